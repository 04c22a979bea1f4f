#include "soup/metrics.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "soup/kernels.hpp"

namespace soup {

const char* kind_name(DistanceKind kind) {
  return kind == DistanceKind::Diversity ? "diversity" : "euclidean";
}

DistanceKind parse_kind(const std::string& name) {
  if (name == "diversity") return DistanceKind::Diversity;
  if (name == "euclidean") return DistanceKind::Euclidean;
  throw std::invalid_argument("unknown distance kind '" + name + "'");
}

double ratio_error(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("ratio_error: length mismatch");
  const auto c = kernels::active().error_counts(a.words().data(), b.words().data(), a.size());
  if (c.shared == 0) return c.unshared == 0 ? 0.0 : kInfiniteDiversity;
  return static_cast<double>(c.unshared) / static_cast<double>(c.shared);
}

double euclidean_sq(const WeightVector& a, const WeightVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("euclidean_sq: length mismatch");
  return kernels::squared_distance(a.values(), b.values());
}

PairwiseDiversity avg_pairwise_diversity(std::span<const BitVector* const> models) {
  if (models.size() < 2) throw std::invalid_argument("average pairwise diversity needs at least 2 models");
  PairwiseDiversity out;
  double sum = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      const double d = ratio_error(*models[i], *models[j]);
      if (d == kInfiniteDiversity) {
        ++out.infinite_pairs;
      } else {
        sum += d;
        ++out.finite_pairs;
      }
    }
  }
  out.mean = out.finite_pairs == 0 ? kInfiniteDiversity : sum / static_cast<double>(out.finite_pairs);
  return out;
}

DistanceMatrix::DistanceMatrix(DistanceKind kind, std::vector<std::string> ids)
    : kind_(kind), ids_(std::move(ids)), data_(ids_.size() * ids_.size(), 0.0) {}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  data_[i * size() + j] = value;
  data_[j * size() + i] = value;
}

void DistanceMatrix::write_csv(std::ostream& out) const {
  out << "id";
  for (const auto& id : ids_) out << ',' << id;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < size(); ++i) {
    out << ids_[i];
    for (std::size_t j = 0; j < size(); ++j) {
      const double v = (*this)(i, j);
      if (v == kInfiniteDiversity) {
        out << ",inf";
      } else {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out << buf;
      }
    }
    out << '\n';
  }
}

DistanceMatrix pairwise_distance_matrix(std::span<const DistanceItem> items, DistanceKind kind) {
  if (items.size() < 2) throw std::invalid_argument("distance matrix needs at least 2 items");
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const auto& it : items) ids.push_back(it.id);
  DistanceMatrix m(kind, std::move(ids));
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const double d = kind == DistanceKind::Diversity
                           ? ratio_error(*items[i].correct, *items[j].correct)
                           : euclidean_sq(*items[i].weights, *items[j].weights);
      m.set(i, j, d);
    }
  }
  return m;
}

}  // namespace soup
