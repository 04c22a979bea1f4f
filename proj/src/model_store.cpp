#include "soup/model_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "soup/kernels.hpp"

namespace soup {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'S', 'O', 'U', 'P'};
constexpr std::uint32_t kWeightFormatVersion = 1;
constexpr int kManifestVersion = 1;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(p[i]) << (8 * i));
  return v;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError(BundleErrorKind::MissingFile, "missing file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw BundleError(BundleErrorKind::Io, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw BundleError(BundleErrorKind::Io, "write failed: " + path.string());
}

fs::path weight_path(const fs::path& dir, int id) { return dir / "models" / (std::to_string(id) + ".wts"); }
fs::path corr_path(const fs::path& dir, int id) { return dir / "models" / (std::to_string(id) + ".corr"); }

}  // namespace

// ---------------------------------------------------------------------------

WeightVector::WeightVector(std::vector<float> values) : values_(std::move(values)) {
  if (values_.empty()) throw DataError("weight vector must be non-empty");
  if (!std::all_of(values_.begin(), values_.end(), [](float v) { return std::isfinite(v); })) {
    throw DataError("weight vector contains a non-finite entry");
  }
}

BitVector::BitVector(std::size_t n_bits) : n_bits_(n_bits), words_((n_bits + 63) / 64, 0) {}

void BitVector::set(std::size_t i, bool value) {
  const std::uint64_t bit = std::uint64_t{1} << (i % 64);
  if (value) {
    words_[i / 64] |= bit;
  } else {
    words_[i / 64] &= ~bit;
  }
}

std::size_t BitVector::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::uint8_t> BitVector::to_bytes() const {
  std::vector<std::uint8_t> out((n_bits_ + 7) / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::size_t n_bits) {
  if (bytes.size() != (n_bits + 7) / 8) {
    throw BundleError(BundleErrorKind::LengthMismatch, "length mismatch: bit vector of " +
                                                           std::to_string(n_bits) + " bits needs " +
                                                           std::to_string((n_bits + 7) / 8) + " bytes");
  }
  BitVector v(n_bits);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    v.words_[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (8 * (i % 8));
  }
  if (n_bits % 64 != 0 && !v.words_.empty()) {
    const std::uint64_t mask = (std::uint64_t{1} << (n_bits % 64)) - 1;
    if ((v.words_.back() & ~mask) != 0) {
      throw BundleError(BundleErrorKind::InvariantViolation, "padding bits set in correctness vector");
    }
  }
  return v;
}

std::string BitVector::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  for (auto byte : to_bytes()) {
    out.push_back(digits[byte >> 4]);
    out.push_back(digits[byte & 0xf]);
  }
  return out;
}

BitVector BitVector::from_hex(const std::string& hex, std::size_t n_bits) {
  if (hex.size() % 2 != 0) throw DataError("odd-length hex bit string");
  std::vector<std::uint8_t> bytes(hex.size() / 2);
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    throw DataError(std::string("bad hex digit '") + c + "'");
  };
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return from_bytes(bytes, n_bits);
}

const char* split_name(Split s) { return s == Split::IdVal ? "id_val" : "ood_test"; }

const ModelEntry& Bundle::model(int id) const {
  if (id < 1 || static_cast<std::size_t>(id) > models.size()) {
    throw DataError("unknown model id " + std::to_string(id));
  }
  return models[static_cast<std::size_t>(id - 1)];
}

// ---------------------------------------------------------------------------

WeightVector average_weights(std::span<const WeightVector* const> members) {
  if (members.empty()) throw std::invalid_argument("empty ingredient set");
  const std::size_t n = members.front()->size();
  for (const WeightVector* m : members) {
    if (m->size() != n) throw std::invalid_argument("incompatible shapes");
  }
  std::vector<double> acc(n, 0.0);
  for (const WeightVector* m : members) kernels::accumulate(m->values(), acc);
  const double count = static_cast<double>(members.size());
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(acc[i] / count);
  return WeightVector(std::move(out));
}

WeightVector average_weights(std::span<const WeightVector> members) {
  std::vector<const WeightVector*> ptrs;
  ptrs.reserve(members.size());
  for (const auto& m : members) ptrs.push_back(&m);
  return average_weights(std::span<const WeightVector* const>(ptrs));
}

// ---------------------------------------------------------------------------

void validate_bundle(const Bundle& bundle) {
  auto fail = [](const std::string& msg) { throw BundleError(BundleErrorKind::InvariantViolation, msg); };
  const auto& m = bundle.manifest;
  for (std::size_t i = 0; i < bundle.models.size(); ++i) {
    const ModelEntry& e = bundle.models[i];
    const std::string who = "model " + std::to_string(e.id);
    if (e.id != static_cast<int>(i) + 1) fail("model ids must be contiguous from 1; found " + std::to_string(e.id) + " at position " + std::to_string(i + 1));
    if (e.weights.size() == 0 || e.weights.size() != m.weight_length) {
      throw BundleError(BundleErrorKind::LengthMismatch, "length mismatch: " + who + " has " +
                                                             std::to_string(e.weights.size()) +
                                                             " weights, manifest declares " +
                                                             std::to_string(m.weight_length));
    }
    if (e.correctness.id_val.size() != m.id_val_size || e.correctness.ood_test.size() != m.ood_size) {
      throw BundleError(BundleErrorKind::LengthMismatch, "length mismatch: " + who + " correctness split sizes differ from manifest");
    }
    if (std::abs(e.id_val_accuracy - accuracy_of(e.correctness.id_val)) > 1e-9) {
      fail("accuracy inconsistent with correctness for " + who);
    }
  }
}

void write_weight_file(const fs::path& path, const WeightVector& w) {
  std::vector<std::uint8_t> bytes(kMagic, kMagic + 4);
  bytes.reserve(16 + 4 * w.size());
  put_le<std::uint32_t>(bytes, kWeightFormatVersion);
  put_le<std::uint64_t>(bytes, static_cast<std::uint64_t>(w.size()));
  for (float v : w.values()) put_le<std::uint32_t>(bytes, std::bit_cast<std::uint32_t>(v));
  write_file(path, bytes);
}

WeightVector read_weight_file(const fs::path& path, std::size_t expected_length) {
  const auto bytes = read_file(path);
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw BundleError(BundleErrorKind::BadMagic, "bad magic in " + path.string());
  }
  if (bytes.size() < 16) throw BundleError(BundleErrorKind::LengthMismatch, "length mismatch: truncated header in " + path.string());
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kWeightFormatVersion) {
    throw SchemaError("unsupported weight file version " + std::to_string(version) + " in " + path.string());
  }
  const auto length = get_le<std::uint64_t>(bytes.data() + 8);
  const std::size_t payload = bytes.size() - 16;
  if (length != expected_length || payload != 4 * expected_length) {
    throw BundleError(BundleErrorKind::LengthMismatch,
                      "length mismatch in " + path.string() + ": manifest declares " +
                          std::to_string(expected_length) + " floats, header says " +
                          std::to_string(length) + ", payload holds " + std::to_string(payload / 4));
  }
  std::vector<float> values(expected_length);
  for (std::size_t i = 0; i < expected_length; ++i) {
    values[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes.data() + 16 + 4 * i));
  }
  try {
    return WeightVector(std::move(values));
  } catch (const DataError& e) {
    throw BundleError(BundleErrorKind::InvariantViolation, std::string(e.what()) + " in " + path.string());
  }
}

void save_bundle(const Bundle& bundle, const fs::path& dir) {
  validate_bundle(bundle);
  std::error_code ec;
  fs::create_directories(dir / "models", ec);
  if (ec) throw BundleError(BundleErrorKind::Io, "cannot create " + (dir / "models").string() + ": " + ec.message());

  const auto& m = bundle.manifest;
  json manifest = {
      {"format", "soup-bundle"},
      {"version", kManifestVersion},
      {"trial", m.trial},
      {"environment", m.environment},
      {"weight_length", m.weight_length},
      {"splits", json::array({{{"name", "id_val"}, {"size", m.id_val_size}},
                              {{"name", "ood_test"}, {"size", m.ood_size}}})},
      {"config_hash", m.config_hash},
      {"generator", m.generator},
  };
  json models = json::array();
  for (const ModelEntry& e : bundle.models) {
    models.push_back({{"id", e.id},
                      {"weights", "models/" + std::to_string(e.id) + ".wts"},
                      {"correctness", "models/" + std::to_string(e.id) + ".corr"},
                      {"id_val_accuracy", e.id_val_accuracy},
                      {"hyperparams", e.hyperparams}});
    write_weight_file(weight_path(dir, e.id), e.weights);
    auto corr = e.correctness.id_val.to_bytes();
    const auto ood = e.correctness.ood_test.to_bytes();
    corr.insert(corr.end(), ood.begin(), ood.end());
    write_file(corr_path(dir, e.id), corr);
  }
  manifest["models"] = std::move(models);
  const std::string text = manifest.dump(2) + "\n";
  write_file(dir / "manifest.json", std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Bundle load_bundle(const fs::path& dir) {
  const auto raw = read_file(dir / "manifest.json");
  json manifest;
  try {
    manifest = json::parse(raw.begin(), raw.end());
  } catch (const json::exception& e) {
    throw BundleError(BundleErrorKind::InvariantViolation, "unparseable manifest " + (dir / "manifest.json").string() + ": " + e.what());
  }

  Bundle bundle;
  try {
    if (manifest.value("format", "") != "soup-bundle") {
      throw BundleError(BundleErrorKind::InvariantViolation, "not a bundle manifest: " + dir.string());
    }
    if (manifest.at("version").get<int>() != kManifestVersion) {
      throw SchemaError("unsupported bundle manifest version in " + dir.string());
    }
    auto& m = bundle.manifest;
    m.trial = manifest.at("trial").get<int>();
    m.environment = manifest.at("environment").get<int>();
    m.weight_length = manifest.at("weight_length").get<std::size_t>();
    const auto& splits = manifest.at("splits");
    if (splits.size() != 2 || splits[0].at("name") != "id_val" || splits[1].at("name") != "ood_test") {
      throw BundleError(BundleErrorKind::InvariantViolation, "manifest must declare splits [id_val, ood_test]");
    }
    m.id_val_size = splits[0].at("size").get<std::size_t>();
    m.ood_size = splits[1].at("size").get<std::size_t>();
    m.config_hash = manifest.value("config_hash", "");
    m.generator = manifest.value("generator", json::object());

    for (const auto& entry : manifest.at("models")) {
      ModelEntry e;
      e.id = entry.at("id").get<int>();
      e.id_val_accuracy = entry.at("id_val_accuracy").get<double>();
      e.hyperparams = entry.value("hyperparams", json::object());
      e.weights = read_weight_file(dir / entry.at("weights").get<std::string>(), m.weight_length);
      const auto corr_file = dir / entry.at("correctness").get<std::string>();
      const auto corr = read_file(corr_file);
      const std::size_t a = (m.id_val_size + 7) / 8;
      const std::size_t b = (m.ood_size + 7) / 8;
      if (corr.size() != a + b) {
        throw BundleError(BundleErrorKind::LengthMismatch, "length mismatch in " + corr_file.string() + ": expected " +
                                                               std::to_string(a + b) + " bytes, found " + std::to_string(corr.size()));
      }
      e.correctness.id_val = BitVector::from_bytes(std::span(corr).first(a), m.id_val_size);
      e.correctness.ood_test = BitVector::from_bytes(std::span(corr).subspan(a), m.ood_size);
      bundle.models.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw BundleError(BundleErrorKind::InvariantViolation, "malformed manifest in " + dir.string() + ": " + e.what());
  }
  validate_bundle(bundle);
  return bundle;
}

}  // namespace soup
