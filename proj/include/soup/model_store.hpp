#pragma once

// In-memory and on-disk representation of model populations ("bundles").
//
// Directory layout:
//   manifest.json
//   models/<id>.wts    "SOUP" | u32 version | u64 L | L x f32, all little-endian
//   models/<id>.corr   packed correctness bits, LSB-first, one block per split
//                      in the order declared by the manifest

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "soup/error.hpp"

namespace soup {

using json = nlohmann::json;

// Flat parameter vector of one model. Non-empty and finite.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<float> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::span<const float> values() const { return values_; }
  float operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<float> values_;
};

// Fixed-length bit vector stored in 64-bit words, bit i of the vector at
// bit (i % 64) of word (i / 64). Padding bits are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n_bits);

  std::size_t size() const { return n_bits_; }
  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i, bool value);
  std::size_t count() const;
  std::span<const std::uint64_t> words() const { return words_; }

  // Packed bytes, LSB-first within each byte: ceil(size / 8) bytes.
  std::vector<std::uint8_t> to_bytes() const;
  static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t n_bits);

  std::string to_hex() const;
  static BitVector from_hex(const std::string& hex, std::size_t n_bits);

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t n_bits_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class Split { IdVal, OodTest };

const char* split_name(Split s);

struct CorrectnessRecord {
  BitVector id_val;
  BitVector ood_test;

  const BitVector& at(Split s) const { return s == Split::IdVal ? id_val : ood_test; }
  friend bool operator==(const CorrectnessRecord&, const CorrectnessRecord&) = default;
};

inline double accuracy_of(const BitVector& bits) {
  return bits.size() == 0 ? 0.0 : static_cast<double>(bits.count()) / static_cast<double>(bits.size());
}

struct ModelEntry {
  int id = 0;
  WeightVector weights;
  CorrectnessRecord correctness;
  json hyperparams = json::object();
  double id_val_accuracy = 0.0;

  double ood_accuracy() const { return accuracy_of(correctness.ood_test); }
  friend bool operator==(const ModelEntry&, const ModelEntry&) = default;
};

struct BundleManifest {
  int trial = 0;
  int environment = 0;
  std::size_t weight_length = 0;
  std::size_t id_val_size = 0;
  std::size_t ood_size = 0;
  std::string config_hash;
  // Everything needed to regenerate the population and its evaluation data.
  json generator = json::object();

  friend bool operator==(const BundleManifest&, const BundleManifest&) = default;
};

struct Bundle {
  BundleManifest manifest;
  std::vector<ModelEntry> models;

  const ModelEntry& model(int id) const;
  friend bool operator==(const Bundle&, const Bundle&) = default;
};

enum class BundleErrorKind { MissingFile, BadMagic, LengthMismatch, InvariantViolation, Io };

class BundleError : public DataError {
 public:
  BundleError(BundleErrorKind kind, const std::string& what) : DataError(what), kind_(kind) {}
  BundleErrorKind kind() const { return kind_; }

 private:
  BundleErrorKind kind_;
};

// Element-wise mean, accumulated in double and rounded once to float.
// Throws std::invalid_argument on an empty list or mismatched lengths.
WeightVector average_weights(std::span<const WeightVector* const> members);
WeightVector average_weights(std::span<const WeightVector> members);

// Checks every Bundle invariant; throws BundleError(InvariantViolation).
void validate_bundle(const Bundle& bundle);

void save_bundle(const Bundle& bundle, const std::filesystem::path& dir);
Bundle load_bundle(const std::filesystem::path& dir);

// Single weight-file helpers, exposed for tooling and tests.
void write_weight_file(const std::filesystem::path& path, const WeightVector& w);
WeightVector read_weight_file(const std::filesystem::path& path, std::size_t expected_length);

}  // namespace soup
