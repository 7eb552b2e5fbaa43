// Copyright 2026 The ADDM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "addm/model_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include "addm/error.hpp"
#include "addm/report.hpp"

static_assert(std::endian::native == std::endian::little,
              "model files are written in host byte order, which must be little-endian");

namespace addm {

namespace {

enum Section : std::uint32_t {
  kMethod = 1,
  kScaler,
  kWeights,
  kPhases,
  kEigenvectors,
  kEigenvalues,
  kAutoencoder,
  kReference,
  kThreshold,
  kMetadata,
};

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void vec(std::span<const double> v) {
    pod<std::uint64_t>(v.size());
    for (double x : v) pod(x);
  }
  void mat(const Tensor& m) {
    const bool empty = m.rank() != 2;
    pod<std::uint64_t>(empty ? 0 : m.rows());
    pod<std::uint64_t>(empty ? 0 : m.cols());
    if (!empty)
      for (double x : m.data()) pod(x);
  }
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

  // Section payload is written by `body`; its length is patched in after.
  template <typename F>
  void section(Section id, F&& body) {
    pod<std::uint32_t>(id);
    const std::size_t at = buf_.size();
    pod<std::uint64_t>(0);
    body();
    const std::uint64_t len = buf_.size() - at - sizeof(std::uint64_t);
    std::memcpy(buf_.data() + at, &len, sizeof len);
  }

  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : p_(data), end_(data + size) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, p_, sizeof(T));
    p_ += sizeof(T);
    return v;
  }
  std::vector<double> vec() {
    const auto n = pod<std::uint64_t>();
    need_elements(n);
    std::vector<double> v(n);
    for (auto& x : v) x = pod<double>();
    return v;
  }
  Tensor mat() {
    const auto r = pod<std::uint64_t>(), c = pod<std::uint64_t>();
    if (r == 0 && c == 0) return {};
    if (c != 0 && r > std::numeric_limits<std::uint64_t>::max() / c)
      throw FormatError("model file: matrix size overflows");
    need_elements(r * c);
    std::vector<double> v(r * c);
    for (auto& x : v) x = pod<double>();
    return Tensor(Shape{r, c}, std::move(v));
  }
  std::string rest() {
    std::string s(reinterpret_cast<const char*>(p_), static_cast<std::size_t>(end_ - p_));
    p_ = end_;
    return s;
  }
  // Reader over the next section, which must carry `id`.
  Reader section(Section id) {
    const auto got = pod<std::uint32_t>();
    if (got != id)
      throw FormatError("model file: expected section " + std::to_string(id) + ", found " +
                        std::to_string(got));
    const auto len = pod<std::uint64_t>();
    need(len);
    Reader sub(p_, len);
    p_ += len;
    return sub;
  }
  void finish(const char* what) const {
    if (p_ != end_) throw FormatError(std::string("model file: trailing bytes in ") + what);
  }
  bool done() const { return p_ == end_; }

 private:
  void need(std::uint64_t n) const {
    if (n > static_cast<std::uint64_t>(end_ - p_)) throw FormatError("model file: truncated");
  }
  void need_elements(std::uint64_t n) const {
    if (n > static_cast<std::uint64_t>(end_ - p_) / sizeof(double))
      throw FormatError("model file: truncated");
  }

  const std::uint8_t* p_;
  const std::uint8_t* end_;
};

std::uint32_t checksum(const std::uint8_t* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const TrainedModel& model) {
  Writer w;
  w.bytes(std::string_view(kModelMagic, sizeof kModelMagic));
  w.pod(kModelVersion);
  w.section(kMethod, [&] { w.pod(static_cast<std::uint8_t>(model.method)); });
  w.section(kScaler, [&] {
    w.vec(model.scaler.mean);
    w.vec(model.scaler.scale);
  });
  w.section(kWeights, [&] { w.mat(model.feature_map.weights); });
  w.section(kPhases, [&] { w.vec(model.feature_map.phases); });
  w.section(kEigenvectors, [&] { w.mat(model.density.eigenvectors); });
  w.section(kEigenvalues, [&] {
    w.pod(model.density.normalization);
    w.vec(model.density.eigenvalues);
  });
  w.section(kAutoencoder, [&] {
    w.pod<std::uint64_t>(model.autoencoder.encoder.size());
    w.pod<std::uint64_t>(model.autoencoder.decoder.size());
    for (const auto* half : {&model.autoencoder.encoder, &model.autoencoder.decoder})
      for (const DenseLayer& l : *half) {
        w.pod(static_cast<std::uint8_t>(l.activation));
        w.mat(l.weights);
        w.vec(l.bias.data());
      }
  });
  w.section(kReference, [&] { w.mat(model.reference); });
  w.section(kThreshold, [&] {
    w.pod(model.detector.tau);
    w.pod(model.detector.outlier_rate);
  });
  w.section(kMetadata, [&] { w.bytes(config_to_json(model.config).dump()); });
  auto& buf = w.buffer();
  const std::uint32_t crc = checksum(buf.data(), buf.size());
  w.pod(crc);
  return std::move(buf);
}

TrainedModel deserialize_model(const std::vector<std::uint8_t>& bytes) {
  constexpr std::size_t header = sizeof kModelMagic + sizeof(std::uint32_t);
  if (bytes.size() < header + sizeof(std::uint32_t)) throw FormatError("model file: truncated");
  if (std::memcmp(bytes.data(), kModelMagic, sizeof kModelMagic) != 0)
    throw FormatError("model file: bad magic bytes");
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + sizeof kModelMagic, sizeof version);
  if (version != kModelVersion)
    throw FormatError("model file: version " + std::to_string(version) + ", expected " +
                      std::to_string(kModelVersion));
  const std::size_t body = bytes.size() - sizeof(std::uint32_t);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, sizeof stored);
  if (stored != checksum(bytes.data(), body)) throw FormatError("model file: checksum mismatch");

  Reader r(bytes.data() + header, body - header);
  TrainedModel m;
  {
    Reader s = r.section(kMethod);
    const auto tag = s.pod<std::uint8_t>();
    if (tag > static_cast<std::uint8_t>(Method::LaddmNoRecon))
      throw FormatError("model file: unknown method tag " + std::to_string(tag));
    m.method = static_cast<Method>(tag);
    s.finish("method");
  }
  {
    Reader s = r.section(kScaler);
    m.scaler.mean = s.vec();
    m.scaler.scale = s.vec();
    s.finish("scaler");
    if (m.scaler.mean.size() != m.scaler.scale.size())
      throw FormatError("model file: scaler mean and scale differ in length");
  }
  {
    Reader s = r.section(kWeights);
    m.feature_map.weights = s.mat();
    s.finish("W");
  }
  {
    Reader s = r.section(kPhases);
    m.feature_map.phases = s.vec();
    s.finish("b");
  }
  {
    Reader s = r.section(kEigenvectors);
    m.density.eigenvectors = s.mat();
    s.finish("V");
  }
  {
    Reader s = r.section(kEigenvalues);
    m.density.normalization = s.pod<double>();
    m.density.eigenvalues = s.vec();
    s.finish("lambda");
  }
  {
    Reader s = r.section(kAutoencoder);
    const auto n_enc = s.pod<std::uint64_t>(), n_dec = s.pod<std::uint64_t>();
    for (auto* half : {&m.autoencoder.encoder, &m.autoencoder.decoder}) {
      const auto count = half == &m.autoencoder.encoder ? n_enc : n_dec;
      for (std::uint64_t i = 0; i < count; ++i) {
        const auto act = s.pod<std::uint8_t>();
        if (act > static_cast<std::uint8_t>(Activation::Relu))
          throw FormatError("model file: unknown activation tag " + std::to_string(act));
        DenseLayer l;
        l.activation = static_cast<Activation>(act);
        l.weights = s.mat();
        l.bias = Tensor::vector(s.vec());
        half->push_back(std::move(l));
      }
    }
    s.finish("autoencoder");
  }
  {
    Reader s = r.section(kReference);
    m.reference = s.mat();
    s.finish("reference");
  }
  {
    Reader s = r.section(kThreshold);
    m.detector.tau = s.pod<double>();
    m.detector.outlier_rate = s.pod<double>();
    s.finish("tau");
  }
  {
    Reader s = r.section(kMetadata);
    try {
      m.config = config_from_json(nlohmann::json::parse(s.rest()));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("model file: bad metadata: ") + e.what());
    }
  }
  r.finish("model file");
  if (m.config.method != m.method) throw FormatError("model file: method tag and metadata disagree");
  m.feature_map.gamma = m.config.gamma;

  try {
    if (m.method == Method::Addm || m.method == Method::Laddm || m.method == Method::LaddmNoRecon) {
      m.density.validate();
      if (m.feature_map.weights.rows() != m.density.features() ||
          m.feature_map.phases.size() != m.density.features())
        throw ShapeError("feature map and density model disagree on D");
    }
    if (m.method == Method::Laddm || m.method == Method::LaddmNoRecon || m.method == Method::Ae)
      m.autoencoder.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("model file: inconsistent model: ") + e.what());
  }
  return m;
}

void save_model(const std::string& path, const TrainedModel& model) {
  const auto bytes = serialize_model(model);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write model file '" + tmp + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for model file '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace addm
