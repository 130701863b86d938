#include <doctest.h>

#include <cmath>
#include <random>

#include "cygnet/error.hpp"
#include "cygnet/optimizer.hpp"
#include "cygnet/trainer.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cygnet;

TEST_CASE("xavier bounds and determinism") {
  CHECK(xavier_bound(2, 2) == doctest::Approx(1.2247448713915890));
  CHECK(xavier_bound(1, 1) == doctest::Approx(std::sqrt(3.0)));

  Rng a(42), b(42);
  auto m1 = xavier_init<float>(2, 2, a);
  auto m2 = xavier_init<float>(2, 2, b);
  CHECK(m1 == m2);

  Rng rng(3);
  auto big = xavier_init<double>(50, 30, rng);
  const double bound = xavier_bound(50, 30);
  for (double v : big.flat()) CHECK(std::abs(v) <= bound);

  auto p = init_params<float>(5, 4, 3, 2, rng);
  for (float v : p.copy_bias.flat()) CHECK(v == 0.0f);
  for (float v : p.gen_bias.flat()) CHECK(v == 0.0f);
}

TEST_CASE("batch_loss examples") {
  // Uniform model: zero weights, empty vocabulary.
  ModelParams<double> p(4, 1, 1, 2);
  HistVocab empty;
  const std::vector<Example> one{{{0, 0, 0}, 3}};
  CHECK(batch_loss(p, std::span<const Example>(one), empty, 0.5) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-14));

  // A single in-vocabulary candidate under α=1 takes all the mass.
  HistVocab v;
  v.absorb(std::vector<Triple>{{0, 0, 3}}, 0);
  const std::vector<Example> sure{{{0, 0, 1}, 3}};
  CHECK(batch_loss(p, std::span<const Example>(sure), v, 1.0) == 0.0);

  CHECK_THROWS_AS(batch_loss(p, std::span<const Example>(), v, 1.0), ParameterError);
}

TEST_CASE("batch_loss matches the scalar oracle and is non-negative") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = fixture::grad_instance(rng);
    for (double alpha : {0.0, 0.5, 1.0}) {
      const double got = batch_loss(g.params, std::span<const Example>(g.examples), g.vocab, alpha);
      const double ref = oracle::loss(g.params, g.batch, g.history, alpha, 100.0);
      CHECK(got == doctest::Approx(ref).epsilon(1e-12));
      CHECK(got >= 0.0);
    }
    const double mean = batch_loss(g.params, std::span<const Example>(g.examples), g.vocab, 0.5,
                                   {}, LossReduction::Mean);
    CHECK(mean * g.examples.size() ==
          doctest::Approx(oracle::loss(g.params, g.batch, g.history, 0.5, 100.0)).epsilon(1e-12));
  }
}

TEST_CASE("gradients match central finite differences") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = fixture::grad_instance(rng);
    for (double alpha : {0.0, 0.5, 1.0}) {
      auto grads = batch_gradients(g.params, std::span<const Example>(g.examples), g.vocab, alpha);
      const double err =
          oracle::max_fd_rel_error(g.params, g.batch, g.history, alpha, 100.0, grads);
      CHECK(err <= 1e-5);
    }
  }
}

TEST_CASE("gradients on N=7, d=4, batch of 3") {
  std::mt19937_64 rng(7);
  auto p = oracle::random_params(7, 2, 3, 4, rng, 0.8);
  const std::vector<Quadruple> history{{0, 0, 1, 0}, {0, 0, 4, 1}, {2, 1, 3, 0}};
  const std::vector<Quadruple> batch{{0, 0, 4, 2}, {2, 1, 5, 2}, {6, 0, 0, 2}};
  HistVocab vocab;
  vocab.absorb_until(group_snapshots(history, 2), 2);
  auto ex = to_examples(batch);
  auto grads = batch_gradients(p, std::span<const Example>(ex), vocab, 0.8);
  CHECK(oracle::max_fd_rel_error(p, batch, history, 0.8, 100.0, grads) <= 1e-5);
}

TEST_CASE("gradient structure") {
  std::mt19937_64 rng(31);
  auto g = fixture::grad_instance(rng);

  SUBCASE("alpha 0 leaves the copy path untouched") {
    auto grads = batch_gradients(g.params, std::span<const Example>(g.examples), g.vocab, 0.0);
    for (double v : grads.copy_weight.flat()) CHECK(v == 0.0);
    for (double v : grads.copy_bias.flat()) CHECK(v == 0.0);
  }

  SUBCASE("alpha 1 with an empty vocabulary reduces to softmax cross-entropy") {
    ModelParams<double> p = g.params;
    p.copy_weight.fill(0.0);
    p.copy_bias.fill(0.0);
    HistVocab empty;
    const std::vector<Example> one{{{0, 0, 0}, 1}};
    auto grads = batch_gradients(p, std::span<const Example>(one), empty, 1.0);
    const double n = p.num_entities;
    for (int i = 0; i < p.num_entities; ++i) {
      CHECK(grads.copy_bias(i, 0) == doctest::Approx(1.0 / n - (i == 1)).epsilon(1e-12));
    }
    for (double v : grads.gen_bias.flat()) CHECK(v == 0.0);
  }

  SUBCASE("rows not touched by the batch stay zero") {
    auto grads = batch_gradients(g.params, std::span<const Example>(g.examples), g.vocab, 0.5);
    std::set<EntityId> subjects;
    std::set<RelationId> relations;
    for (const auto& e : g.examples) {
      subjects.insert(e.query.subject);
      relations.insert(e.query.relation);
    }
    for (EntityId e = 0; e < g.params.num_entities; ++e) {
      if (subjects.count(e)) continue;
      for (double v : grads.entity_emb.row(e)) CHECK(v == 0.0);
    }
    for (RelationId r = 0; r < g.params.num_relations; ++r) {
      if (relations.count(r)) continue;
      for (double v : grads.relation_emb.row(r)) CHECK(v == 0.0);
    }
  }

  SUBCASE("non-finite gradients name the tensor") {
    ModelParams<double> p = g.params;
    p.gen_bias(0, 0) = std::nan("");
    try {
      batch_gradients(p, std::span<const Example>(g.examples), g.vocab, 0.0);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      // The NaN spreads through the shared input, so the first tensor visited is reported.
      CHECK(std::string(e.what()).find("entity_emb") != std::string::npos);
    }
  }
}

namespace {

std::vector<double> flatten(const ModelParams<double>& p) {
  std::vector<double> out;
  p.for_each_tensor([&](const char*, const Matrix<double>& m) {
    out.insert(out.end(), m.flat().begin(), m.flat().end());
  });
  return out;
}

}  // namespace

TEST_CASE("AMSGrad") {
  SUBCASE("zero gradient is a fixed point") {
    std::mt19937_64 rng(1);
    auto p = oracle::random_params(3, 2, 2, 2, rng);
    const auto before = p;
    AmsGrad<double> opt(p);
    for (int i = 0; i < 5; ++i) opt.step(p, p.zeros_like(), 1e-3);
    CHECK(p == before);
    CHECK(opt.steps() == 5);
  }

  SUBCASE("one step from zero with unit gradient") {
    ModelParams<double> p(1, 1, 1, 1);
    auto g = p.zeros_like();
    g.for_each_tensor([](const char*, Matrix<double>& m) { m.fill(1.0); });
    AmsGrad<double> opt(p);
    opt.step(p, g, 1e-3);
    const double expected = -1e-3 * 0.1 / (std::sqrt(0.001) + 1e-8);
    p.for_each_tensor([&](const char*, const Matrix<double>& m) {
      for (double v : m.flat()) CHECK(v == doctest::Approx(expected).epsilon(1e-14));
    });
  }

  SUBCASE("max second moment never decreases") {
    std::mt19937_64 rng(9);
    auto p = oracle::random_params(4, 2, 2, 3, rng);
    AmsGrad<double> opt(p);
    auto prev = opt.max_second_moment();
    for (int step = 0; step < 100; ++step) {
      auto g = oracle::random_params(4, 2, 2, 3, rng, step % 10 == 0 ? 5.0 : 0.1);
      opt.step(p, g, 1e-2);
      const auto& cur = opt.max_second_moment();
      const auto a = flatten(prev), b = flatten(cur), v = flatten(opt.second_moment());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i] >= a[i]);
        CHECK(b[i] >= v[i]);
      }
      prev = cur;
    }
  }
}

namespace {

Dataset two_snapshot_dataset() {
  Dataset ds;
  ds.name = "toy";
  ds.meta = {6, 2, 2, 1};
  ds.reciprocal = false;
  ds.num_relations_aug = 2;
  ds.train = {{0, 0, 1, 0}, {1, 0, 2, 0}, {2, 1, 3, 0}, {3, 1, 4, 0}, {4, 0, 5, 0},
              {0, 0, 1, 1}, {1, 0, 3, 1}, {5, 1, 0, 1}};
  return ds;
}

TrainConfig small_config() {
  TrainConfig c;
  c.dim = 4;
  c.batch_size = 2;
  c.epochs = 1;
  c.exec = Exec::Serial;
  return c;
}

}  // namespace

TEST_CASE("fit step count") {
  auto ds = two_snapshot_dataset();
  auto result = fit(ds, small_config());
  CHECK(result.steps == 3 + 2);  // ceil(5/2) + ceil(3/2)
  REQUIRE(result.log.size() == 1);

  auto cfg = small_config();
  cfg.epochs = 3;
  cfg.batch_size = 1024;
  CHECK(fit(ds, cfg).steps == 3 * 2);
}

TEST_CASE("fit is deterministic and thread-count independent") {
  auto ds = fixture::synth_dataset(0.7, 4, false);
  auto cfg = small_config();
  cfg.dim = 8;
  cfg.epochs = 2;
  cfg.batch_size = 64;
  auto a = fit(ds, cfg);
  auto b = fit(ds, cfg);
  CHECK(a.params == b.params);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) CHECK(a.log[i].loss == b.log[i].loss);

  cfg.exec = Exec::Parallel;
  auto c = fit(ds, cfg);
  CHECK(c.params == a.params);
}

TEST_CASE("schedule causality: batches only see earlier snapshots") {
  auto ds = fixture::synth_dataset(0.8, 2, false);
  auto cfg = small_config();
  cfg.dim = 4;
  cfg.epochs = 2;
  cfg.batch_size = 128;
  std::size_t batches = 0;
  FitHooks hooks;
  hooks.on_batch = [&](SnapshotIndex k, std::span<const Example> batch, const HistVocab& vocab) {
    ++batches;
    CHECK(vocab.frontier() == k);
    const auto expected = oracle::vocab_brute(ds.train, k);
    for (const auto& ex : batch) {
      CHECK(ex.query.step == k);
      auto got = vocab.lookup(ex.query.subject, ex.query.relation);
      auto it = expected.find({ex.query.subject, ex.query.relation});
      const std::set<EntityId> want = it == expected.end() ? std::set<EntityId>{} : it->second;
      CHECK(std::set<EntityId>(got.begin(), got.end()) == want);
    }
  };
  fit(ds, cfg, hooks);
  CHECK(batches > 0);
}

TEST_CASE("training loss falls on a fixed-object recurrent dataset") {
  auto ds = fixture::synth_dataset(1.0, 0, true);
  TrainConfig cfg;
  cfg.dim = 32;
  cfg.epochs = 5;
  cfg.exec = Exec::Parallel;
  auto result = fit(ds, cfg);
  REQUIRE(result.log.size() == 5);
  for (std::size_t e = 1; e < result.log.size(); ++e) {
    CHECK(result.log[e].loss <= result.log[e - 1].loss + 1e-3);
  }
}

TEST_CASE("early stopping keeps the best epoch") {
  auto ds = two_snapshot_dataset();
  auto cfg = small_config();
  cfg.epochs = 10;
  cfg.patience = 2;
  int calls = 0;
  ModelParams<float> at_best;
  FitHooks hooks;
  // Scores peak at epoch 2, then fall.
  hooks.validate = [&](const ModelParams<float>& p) {
    ++calls;
    if (calls == 2) at_best = p;
    return calls == 2 ? 1.0 : 0.5 - 0.01 * calls;
  };
  auto result = fit(ds, cfg, hooks);
  CHECK(result.log.size() == 4);
  CHECK(result.best_epoch == 2);
  CHECK(result.params == at_best);
}

TEST_CASE("config validation and defaults") {
  TrainConfig c;
  CHECK_NOTHROW(validate(c));
  auto bad = [&](auto mutate) {
    TrainConfig x;
    mutate(x);
    CHECK_THROWS_AS(validate(x), ParameterError);
  };
  bad([](TrainConfig& x) { x.alpha = 1.2; });
  bad([](TrainConfig& x) { x.dim = 0; });
  bad([](TrainConfig& x) { x.learning_rate = 0; });
  bad([](TrainConfig& x) { x.batch_size = -1; });
  bad([](TrainConfig& x) { x.epochs = 0; });
  bad([](TrainConfig& x) { x.mask_magnitude = 0; });

  CHECK(default_alpha("ICEWS18") == 0.8);
  CHECK(default_alpha("icews14") == 0.8);
  CHECK(default_alpha("GDELT") == 0.7);
  CHECK(default_alpha("WIKI") == 0.5);
  CHECK(default_alpha("yago") == 0.5);
  CHECK(default_alpha("synth") == 0.8);
}

TEST_CASE("build_vocab freezes training facts") {
  auto ds = two_snapshot_dataset();
  ds.valid = {{0, 0, 5, 2}};
  auto v = build_vocab(ds);
  CHECK(v.frontier() == 2);
  CHECK(std::vector<EntityId>(v.lookup(0, 0).begin(), v.lookup(0, 0).end()) ==
        std::vector<EntityId>{1});
  auto with_valid = build_vocab(ds, true);
  CHECK(std::vector<EntityId>(with_valid.lookup(0, 0).begin(), with_valid.lookup(0, 0).end()) ==
        std::vector<EntityId>{1, 5});
}
