#pragma once

// Pairwise distances between models or weight-averages.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "soup/model_store.hpp"

namespace soup {

// Ratio-error of a pair with unshared errors but no shared ones.
// Ranks above every finite diversity.
inline constexpr double kInfiniteDiversity = std::numeric_limits<double>::infinity();

enum class DistanceKind { Diversity, Euclidean };

const char* kind_name(DistanceKind kind);
DistanceKind parse_kind(const std::string& name);

// Unshared errors over shared errors on one split. 0 when neither model errs
// anywhere or the error sets coincide; kInfiniteDiversity when errors exist
// but none are shared.
double ratio_error(const BitVector& a, const BitVector& b);

// Squared L2 distance between flattened parameter vectors.
double euclidean_sq(const WeightVector& a, const WeightVector& b);

struct PairwiseDiversity {
  double mean = 0.0;             // over finite pairs; +inf when none are finite
  std::size_t finite_pairs = 0;
  std::size_t infinite_pairs = 0;
};

PairwiseDiversity avg_pairwise_diversity(std::span<const BitVector* const> models);

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(DistanceKind kind, std::vector<std::string> ids);

  std::size_t size() const { return ids_.size(); }
  DistanceKind kind() const { return kind_; }
  const std::vector<std::string>& ids() const { return ids_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * size() + j]; }
  // Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value);

  // Row-major CSV; header "id,<ids...>"; infinity written as "inf".
  void write_csv(std::ostream& out) const;

 private:
  DistanceKind kind_ = DistanceKind::Euclidean;
  std::vector<std::string> ids_;
  std::vector<double> data_;
};

struct DistanceItem {
  std::string id;
  const WeightVector* weights = nullptr;
  const BitVector* correct = nullptr;  // ID validation correctness
};

DistanceMatrix pairwise_distance_matrix(std::span<const DistanceItem> items, DistanceKind kind);

}  // namespace soup
