#pragma once

#include "soup/model_store.hpp"

namespace soup {

// Per-example correctness of one weight vector on the two held data splits.
struct Evaluation {
  BitVector id_val;
  BitVector ood_test;

  double id_val_accuracy() const { return accuracy_of(id_val); }
  double ood_accuracy() const { return accuracy_of(ood_test); }
};

// Accuracy oracle used by the selection algorithms. Implementations must be
// deterministic and safe to call concurrently.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual Evaluation evaluate(const WeightVector& weights) const = 0;
};

}  // namespace soup
