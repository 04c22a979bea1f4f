#include "soup/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "soup/parallel.hpp"

namespace soup {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

// ---------------------------------------------------------------------------

void DomainSpec::validate() const {
  if (domains.empty()) throw DataError("domain spec: no domains");
  if (n_classes < 2) throw DataError("domain spec: need at least 2 classes");
  if (train_per_domain == 0 || val_per_domain == 0 || test_per_domain == 0) {
    throw DataError("domain spec: every split needs at least one point");
  }
  if (!(class_spread >= 0.0)) throw DataError("domain spec: negative class spread");
  for (const auto& d : domains) {
    if (d.label_noise < 0.0 || d.label_noise > 1.0) throw DataError("domain spec: label noise outside [0,1]");
  }
}

json to_json(const DomainSpec& spec) {
  json domains = json::array();
  for (const auto& d : spec.domains) {
    domains.push_back({{"rotation_deg", d.rotation_deg},
                       {"shift", {d.shift_x, d.shift_y}},
                       {"label_noise", d.label_noise}});
  }
  return {{"domains", domains},
          {"n_classes", spec.n_classes},
          {"prototype_radius", spec.prototype_radius},
          {"class_spread", spec.class_spread},
          {"train_per_domain", spec.train_per_domain},
          {"val_per_domain", spec.val_per_domain},
          {"test_per_domain", spec.test_per_domain},
          {"seed", spec.seed}};
}

DomainSpec domain_spec_from_json(const json& j) {
  DomainSpec s;
  if (j.contains("domains")) {
    s.domains.clear();
    for (const auto& d : j.at("domains")) {
      DomainTransform t;
      t.rotation_deg = d.value("rotation_deg", 0.0);
      if (d.contains("shift")) {
        t.shift_x = d.at("shift").at(0).get<double>();
        t.shift_y = d.at("shift").at(1).get<double>();
      }
      t.label_noise = d.value("label_noise", 0.0);
      s.domains.push_back(t);
    }
  }
  s.n_classes = j.value("n_classes", s.n_classes);
  s.prototype_radius = j.value("prototype_radius", s.prototype_radius);
  s.class_spread = j.value("class_spread", s.class_spread);
  s.train_per_domain = j.value("train_per_domain", s.train_per_domain);
  s.val_per_domain = j.value("val_per_domain", s.val_per_domain);
  s.test_per_domain = j.value("test_per_domain", s.test_per_domain);
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

namespace {

Dataset sample_split(const DomainSpec& spec, const DomainTransform& t, std::size_t n, std::mt19937_64& rng) {
  const double rot = t.rotation_deg * std::numbers::pi / 180.0;
  std::uniform_int_distribution<int> pick_class(0, spec.n_classes - 1);
  std::normal_distribution<double> noise(0.0, spec.class_spread);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> other(1, spec.n_classes - 1);

  Dataset d;
  d.dim = 2;
  d.x.reserve(2 * n);
  d.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = pick_class(rng);
    const double angle = 2.0 * std::numbers::pi * c / spec.n_classes + rot;
    const double px = spec.prototype_radius * std::cos(angle) + t.shift_x;
    const double py = spec.prototype_radius * std::sin(angle) + t.shift_y;
    d.x.push_back(px + noise(rng));
    d.x.push_back(py + noise(rng));
    int label = c;
    if (coin(rng) < t.label_noise) label = (c + other(rng)) % spec.n_classes;
    d.y.push_back(label);
  }
  return d;
}

}  // namespace

std::vector<DomainData> generate_domains(const DomainSpec& spec) {
  spec.validate();
  std::vector<DomainData> out;
  out.reserve(spec.domains.size());
  for (std::size_t k = 0; k < spec.domains.size(); ++k) {
    std::mt19937_64 rng(derive_seed(spec.seed, 0xd0, k));
    DomainData dd;
    dd.train = sample_split(spec, spec.domains[k], spec.train_per_domain, rng);
    dd.val = sample_split(spec, spec.domains[k], spec.val_per_domain, rng);
    dd.test = sample_split(spec, spec.domains[k], spec.test_per_domain, rng);
    out.push_back(std::move(dd));
  }
  return out;
}

TaskSplits assemble_splits(const std::vector<DomainData>& domains, int held_out) {
  if (held_out < 0 || static_cast<std::size_t>(held_out) >= domains.size()) {
    throw DataError("held-out domain " + std::to_string(held_out) + " out of range");
  }
  if (domains.size() < 2) throw DataError("need at least 2 domains to hold one out");
  TaskSplits s;
  for (std::size_t k = 0; k < domains.size(); ++k) {
    if (static_cast<int>(k) == held_out) continue;
    s.id_train.append(domains[k].train);
    s.id_val.append(domains[k].val);
  }
  s.ood_test = domains[static_cast<std::size_t>(held_out)].test;
  return s;
}

// ---------------------------------------------------------------------------

void FinetuneConfig::validate() const {
  if (!(learning_rate_min > 0.0) || learning_rate_max < learning_rate_min) throw DataError("finetune: bad learning-rate range");
  if (epochs_min < 0 || epochs_max < epochs_min) throw DataError("finetune: bad epoch range");
  if (batch_size_min == 0 || batch_size_max < batch_size_min) throw DataError("finetune: bad batch-size range");
  if (pretrain_batch_size == 0 || pretrain_epochs < 0) throw DataError("finetune: bad pretraining settings");
  if (init_perturbation < 0.0) throw DataError("finetune: negative init perturbation");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw DataError("finetune: train fraction must be in (0, 1]");
}

json to_json(const FinetuneConfig& c) {
  return {{"pretrain_epochs", c.pretrain_epochs},
          {"pretrain_learning_rate", c.pretrain_learning_rate},
          {"pretrain_batch_size", c.pretrain_batch_size},
          {"learning_rate_range", {c.learning_rate_min, c.learning_rate_max}},
          {"epochs_range", {c.epochs_min, c.epochs_max}},
          {"batch_size_range", {c.batch_size_min, c.batch_size_max}},
          {"init_perturbation", c.init_perturbation},
          {"train_fraction", c.train_fraction}};
}

FinetuneConfig finetune_config_from_json(const json& j) {
  FinetuneConfig c;
  c.pretrain_epochs = j.value("pretrain_epochs", c.pretrain_epochs);
  c.pretrain_learning_rate = j.value("pretrain_learning_rate", c.pretrain_learning_rate);
  c.pretrain_batch_size = j.value("pretrain_batch_size", c.pretrain_batch_size);
  if (j.contains("learning_rate_range")) {
    c.learning_rate_min = j.at("learning_rate_range").at(0).get<double>();
    c.learning_rate_max = j.at("learning_rate_range").at(1).get<double>();
  }
  if (j.contains("epochs_range")) {
    c.epochs_min = j.at("epochs_range").at(0).get<int>();
    c.epochs_max = j.at("epochs_range").at(1).get<int>();
  }
  if (j.contains("batch_size_range")) {
    c.batch_size_min = j.at("batch_size_range").at(0).get<std::size_t>();
    c.batch_size_max = j.at("batch_size_range").at(1).get<std::size_t>();
  }
  c.init_perturbation = j.value("init_perturbation", c.init_perturbation);
  c.train_fraction = j.value("train_fraction", c.train_fraction);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

MlpEvaluator::MlpEvaluator(MlpSpec spec, Dataset id_val, Dataset ood_test)
    : spec_(std::move(spec)), id_val_(std::move(id_val)), ood_test_(std::move(ood_test)) {}

Evaluation MlpEvaluator::evaluate(const WeightVector& weights) const {
  return {correctness(spec_, weights, id_val_), correctness(spec_, weights, ood_test_)};
}

Bundle build_population(const PopulationRequest& req) {
  req.mlp.validate();
  req.finetune.validate();
  if (req.mlp.input_dim() != 2 || static_cast<int>(req.mlp.n_classes()) != req.domains.n_classes) {
    throw DataError("MLP input/output widths must match the 2-D, " + std::to_string(req.domains.n_classes) + "-class task");
  }
  const auto domains = generate_domains(req.domains);
  const auto splits = assemble_splits(domains, req.held_out);
  const MlpEvaluator evaluator(req.mlp, splits.id_val, splits.ood_test);
  const auto& ft = req.finetune;

  std::mt19937_64 init_rng(derive_seed(req.seed, 0x1417));
  const WeightVector random_init = init_weights(req.mlp, init_rng);
  const TrainConfig pretrain{ft.pretrain_learning_rate, ft.pretrain_epochs, ft.pretrain_batch_size,
                             derive_seed(req.seed, 0x9e7)};
  const WeightVector shared = train_mlp(req.mlp, random_init, splits.id_train, pretrain);

  std::vector<ModelEntry> models(req.n_models);
  parallel_for(req.n_models, req.jobs, [&](std::size_t i) {
    const int id = static_cast<int>(i) + 1;
    std::mt19937_64 rng(derive_seed(req.seed, 0x30de, static_cast<std::uint64_t>(id)));
    std::uniform_real_distribution<double> log_lr(std::log(ft.learning_rate_min), std::log(ft.learning_rate_max));
    std::uniform_int_distribution<int> epochs(ft.epochs_min, ft.epochs_max);
    std::uniform_int_distribution<std::size_t> batch(ft.batch_size_min, ft.batch_size_max);
    TrainConfig cfg;
    cfg.learning_rate = std::exp(log_lr(rng));
    cfg.epochs = epochs(rng);
    cfg.batch_size = batch(rng);
    cfg.seed = rng();

    std::normal_distribution<double> perturb(0.0, ft.init_perturbation);
    std::vector<float> start(shared.values().begin(), shared.values().end());
    if (ft.init_perturbation > 0.0) {
      for (float& v : start) v = static_cast<float>(v + perturb(rng));
    }
    const Dataset* train = &splits.id_train;
    Dataset subset;
    if (ft.train_fraction < 1.0) {
      const std::size_t n = splits.id_train.size();
      const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(ft.train_fraction * n)));
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(k);
      std::sort(idx.begin(), idx.end());
      subset.dim = splits.id_train.dim;
      for (std::size_t j : idx) {
        const auto p = splits.id_train.point(j);
        subset.x.insert(subset.x.end(), p.begin(), p.end());
        subset.y.push_back(splits.id_train.y[j]);
      }
      train = &subset;
    }
    WeightVector weights;
    try {
      weights = train_mlp(req.mlp, WeightVector(std::move(start)), *train, cfg);
    } catch (const std::exception& e) {
      throw DataError("model " + std::to_string(id) + ": " + e.what());
    }
    const Evaluation ev = evaluator.evaluate(weights);
    ModelEntry& e = models[i];
    e.id = id;
    e.weights = std::move(weights);
    e.correctness = {ev.id_val, ev.ood_test};
    e.id_val_accuracy = ev.id_val_accuracy();
    e.hyperparams = to_json(cfg);
    e.hyperparams["init_perturbation"] = ft.init_perturbation;
    e.hyperparams["train_examples"] = train->size();
  });

  Bundle b;
  b.manifest.trial = req.trial;
  b.manifest.environment = req.held_out;
  b.manifest.weight_length = req.mlp.parameter_count();
  b.manifest.id_val_size = splits.id_val.size();
  b.manifest.ood_size = splits.ood_test.size();
  b.manifest.config_hash = req.config_hash;
  b.manifest.generator = {{"kind", "synthetic-mlp"},
                          {"domains", to_json(req.domains)},
                          {"mlp", to_json(req.mlp)},
                          {"finetune", to_json(req.finetune)},
                          {"n_models", req.n_models},
                          {"held_out", req.held_out},
                          {"seed", req.seed}};
  b.models = std::move(models);
  validate_bundle(b);
  return b;
}

std::unique_ptr<MlpEvaluator> make_evaluator(const Bundle& bundle) {
  const json& g = bundle.manifest.generator;
  if (g.value("kind", "") != "synthetic-mlp") {
    throw DataError("bundle manifest carries no synthetic generator; cannot rebuild its evaluator");
  }
  const DomainSpec dspec = domain_spec_from_json(g.at("domains"));
  const MlpSpec mspec = mlp_spec_from_json(g.at("mlp"));
  auto splits = assemble_splits(generate_domains(dspec), g.at("held_out").get<int>());
  if (splits.id_val.size() != bundle.manifest.id_val_size || splits.ood_test.size() != bundle.manifest.ood_size) {
    throw DataError("regenerated evaluation splits do not match the bundle's declared sizes");
  }
  return std::make_unique<MlpEvaluator>(mspec, std::move(splits.id_val), std::move(splits.ood_test));
}

}  // namespace soup
