#pragma once

// Desk-scale multi-domain classification benchmark.
//
// Class prototypes sit evenly on a circle. Each domain rotates and shifts the
// prototypes, draws isotropic Gaussian points around them, and flips a
// fraction of labels. One domain is held out as the out-of-distribution test
// set; the others are pooled for in-distribution training and validation.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "soup/evaluator.hpp"
#include "soup/mlp.hpp"
#include "soup/model_store.hpp"

namespace soup {

struct DomainTransform {
  double rotation_deg = 0.0;
  double shift_x = 0.0;
  double shift_y = 0.0;
  double label_noise = 0.0;  // probability of relabeling to a different class
};

struct DomainSpec {
  std::vector<DomainTransform> domains = {
      {0.0, 0.0, 0.0, 0.05}, {25.0, 0.4, 0.0, 0.05}, {50.0, 0.0, 0.4, 0.05}, {75.0, -0.4, -0.4, 0.05}};
  int n_classes = 8;
  double prototype_radius = 2.0;
  double class_spread = 1.0;
  std::size_t train_per_domain = 200;
  std::size_t val_per_domain = 300;
  std::size_t test_per_domain = 200;
  std::uint64_t seed = 1;

  void validate() const;
};

json to_json(const DomainSpec& spec);
DomainSpec domain_spec_from_json(const json& j);

struct DomainData {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Deterministic in spec.seed. Throws DataError on a degenerate spec.
std::vector<DomainData> generate_domains(const DomainSpec& spec);

struct TaskSplits {
  Dataset id_train;  // pooled train splits of the in-distribution domains
  Dataset id_val;    // pooled val splits of the in-distribution domains
  Dataset ood_test;  // test split of the held-out domain
};

TaskSplits assemble_splits(const std::vector<DomainData>& domains, int held_out);

struct FinetuneConfig {
  // Shared pretraining on pooled ID data.
  int pretrain_epochs = 15;
  double pretrain_learning_rate = 0.05;
  std::size_t pretrain_batch_size = 32;
  // Per-model fine-tuning, sampled independently for every model.
  double learning_rate_min = 0.1;    // log-uniform
  double learning_rate_max = 0.2;
  int epochs_min = 15;
  int epochs_max = 25;
  std::size_t batch_size_min = 8;
  std::size_t batch_size_max = 16;
  double init_perturbation = 0.05;  // sd of Gaussian noise added to the shared init
  double train_fraction = 0.1;      // each model fine-tunes on its own random subset of this size

  void validate() const;
};

json to_json(const FinetuneConfig& c);
FinetuneConfig finetune_config_from_json(const json& j);

struct PopulationRequest {
  DomainSpec domains;
  MlpSpec mlp;
  FinetuneConfig finetune;
  std::size_t n_models = 20;
  int held_out = 0;
  int trial = 0;
  std::uint64_t seed = 0;  // pretraining/fine-tuning randomness; data comes from domains.seed
  std::string config_hash;
  int jobs = 1;
};

// Pretrains a shared initialization, fine-tunes n_models variants, evaluates
// each, and returns a bundle whose manifest can regenerate everything.
Bundle build_population(const PopulationRequest& request);

// Evaluates MLP weights by forward pass on held splits.
class MlpEvaluator final : public Evaluator {
 public:
  MlpEvaluator(MlpSpec spec, Dataset id_val, Dataset ood_test);
  Evaluation evaluate(const WeightVector& weights) const override;

  const MlpSpec& spec() const { return spec_; }
  const Dataset& id_val() const { return id_val_; }
  const Dataset& ood_test() const { return ood_test_; }

 private:
  MlpSpec spec_;
  Dataset id_val_;
  Dataset ood_test_;
};

// Rebuilds the evaluation splits from a bundle manifest produced by
// build_population.
std::unique_ptr<MlpEvaluator> make_evaluator(const Bundle& bundle);

// splitmix64-style mixing used to derive independent RNG streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace soup
