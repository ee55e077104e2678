// Feature extraction over record pairs and the linear SVM around it.
#include <cmath>
#include <string>
#include <vector>

#include "core/csv.h"
#include "core/error.h"
#include "core/features.h"
#include "core/instance.h"
#include "core/metrics.h"
#include "core/schema.h"
#include "core/similarity.h"
#include "core/svm.h"
#include "doctest.h"
#include "support/checks.h"
#include "support/oracle_margin.h"
#include "support/oracle_text.h"
#include "support/random_instances.h"

using namespace erblox;
using namespace erblox::testing;

namespace {

// Two venue relations that the join slot can resolve through; P.V points at
// W, P.U at X, and both target columns feed one df table.
struct JoinFixture {
  Schema schema;
  Instance inst;

  JoinFixture() {
    schema = load_schema(R"(
relation P(ID: key, T: text, V: numeric, U: numeric)
relation W(WID: key, FN: text)
relation X(XID: key, FN: text)
foreign P.V -> W.WID
foreign P.U -> X.XID
)");
    inst.relations["P"] = ingest_csv(
        "1,alpha beta,10,\n"
        "2,alpha beta,,30\n"
        "3,gamma,99,30\n"   // dangling V; the fallback resolves
        "4,alpha,,\n"       // resolves through neither path
        "5,alpha,11,\n",
        "P", schema);
    inst.relations["W"] = ingest_csv("10,west hall\n11,grand hall\n", "W", schema);
    inst.relations["X"] = ingest_csv("30,west hall\n31,north wing\n", "X", schema);
  }

  FeatureSlot venue_slot(SlotPolicy policy, bool with_fallback) const {
    FeatureSlot slot;
    slot.relation = "P";
    slot.primary = {"V", "W", "FN"};
    if (with_fallback) slot.fallback = FeaturePath{"U", "X", "FN"};
    slot.kernel = Kernel::TfIdfCosine;
    slot.policy = policy;
    return slot;
  }
};

}  // namespace

TEST_CASE("slot policies decide what happens when a path fails") {
  JoinFixture f;
  FeatureSlot title{"P", {"T", "", ""}, std::nullopt, Kernel::TfIdfCosine, SlotPolicy::Zero};

  SUBCASE("substitute falls back per record") {
    FeatureExtractor ex(f.schema, f.inst, {title, f.venue_slot(SlotPolicy::Substitute, true)},
                        "P");
    CHECK(ex.dim() == 2);

    // Record 2 reaches "west hall" only through the fallback join.
    auto v12 = ex.vector_for(1, 2);
    REQUIRE(v12.has_value());
    CHECK((*v12)[0] == doctest::Approx(1.0));  // identical titles
    CHECK((*v12)[1] == doctest::Approx(1.0));  // same venue text via different paths

    // Record 3's V dangles; the fallback rescues it too.
    auto v13 = ex.vector_for(1, 3);
    REQUIRE(v13.has_value());
    CHECK((*v13)[0] == 0.0);  // disjoint titles
    CHECK((*v13)[1] == doctest::Approx(1.0));

    // Record 4 resolves through neither path: the pair is dropped.
    std::string reason;
    CHECK_FALSE(ex.vector_for(1, 4, &reason).has_value());
    CHECK(reason.find("P.V->W.FN") != std::string::npos);
  }

  SUBCASE("skip-pair drops on the first unresolved record") {
    FeatureExtractor ex(f.schema, f.inst, {f.venue_slot(SlotPolicy::SkipPair, false)}, "P");
    CHECK_FALSE(ex.vector_for(1, 2).has_value());  // null V, no fallback
    CHECK(ex.vector_for(1, 5).has_value());
  }

  SUBCASE("zero scores an unresolved slot as zero") {
    FeatureExtractor ex(f.schema, f.inst, {f.venue_slot(SlotPolicy::Zero, false)}, "P");
    auto v12 = ex.vector_for(1, 2);
    REQUIRE(v12.has_value());
    CHECK((*v12)[0] == 0.0);
    auto v13 = ex.vector_for(1, 3);  // dangling reference counts as unresolved
    REQUIRE(v13.has_value());
    CHECK((*v13)[0] == 0.0);
  }
}

TEST_CASE("a join slot's idf spans every column it can resolve through") {
  JoinFixture f;
  FeatureExtractor ex(f.schema, f.inst, {f.venue_slot(SlotPolicy::Substitute, true)}, "P");

  // Pair (1,5) compares "west hall" and "grand hall" under a df table built
  // from both venue columns: 4 docs, west in 2, grand in 1, hall in 3.
  auto v = ex.vector_for(1, 5);
  REQUIRE(v.has_value());
  double qw = 1.0 + std::log(4.0 / 2.0);
  double qg = 1.0 + std::log(4.0 / 1.0);
  double qh = 1.0 + std::log(4.0 / 3.0);
  double expected = qh * qh / (std::sqrt(qw * qw + qh * qh) * std::sqrt(qg * qg + qh * qh));
  CHECK((*v)[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("slot construction rejections") {
  JoinFixture f;
  auto build = [&](FeatureSlot slot) {
    FeatureExtractor ex(f.schema, f.inst, {slot}, "P");
  };
  CHECK(thrown_code([&] {
          build(f.venue_slot(SlotPolicy::Substitute, false));  // substitute needs a fallback
        }) == ErrorCode::Validation);
  CHECK(thrown_code([&] {
          FeatureSlot s{"W", {"FN", "", ""}, std::nullopt, Kernel::TfIdfCosine, SlotPolicy::Zero};
          build(s);  // slot relation must match the classified relation
        }) == ErrorCode::Arg);
  CHECK(thrown_code([&] {
          FeatureSlot s{"P", {"T", "W", "FN"}, std::nullopt, Kernel::TfIdfCosine,
                        SlotPolicy::Zero};
          build(s);  // join source must be numeric
        }) == ErrorCode::Validation);
  CHECK(thrown_code([&] {
          FeatureSlot s{"P", {"T", "", ""}, std::nullopt, Kernel::NumericEdit, SlotPolicy::Zero};
          build(s);  // kernel must fit the resolved domain
        }) == ErrorCode::Validation);
  FeatureExtractor ok(f.schema, f.inst, {f.venue_slot(SlotPolicy::Zero, false)}, "P");
  CHECK(thrown_code([&] { ok.vector_for(1, 999); }) == ErrorCode::Validation);

  CHECK(parse_slot_policy("skip-pair") == SlotPolicy::SkipPair);
  CHECK(parse_slot_policy(slot_policy_name(SlotPolicy::Substitute)) == SlotPolicy::Substitute);
  CHECK(thrown_code([] { parse_slot_policy("ignore"); }) == ErrorCode::Parse);
}

TEST_CASE("decision function, prediction, and objective") {
  SvmModel m;
  m.lambda = 0.02;
  m.weights = {1.0, 0.0};
  m.bias = -1.0;
  CHECK(svm_decision(m, {1.5, 3.0}) == doctest::Approx(0.5));
  CHECK(svm_predict(m, {1.5, 3.0}) == 1);
  CHECK(svm_predict(m, {1.0, 0.0}) == 0);  // a tie is not a duplicate
  CHECK(svm_predict(m, {0.5, 0.0}) == 0);
  CHECK(thrown_code([&] { svm_decision(m, {1.0}); }) == ErrorCode::Arg);

  // Hinge by hand: margins 2 and 1 contribute nothing, margin 0.5 costs 0.5.
  std::vector<std::vector<double>> x = {{3.0, 0.0}, {0.0, 0.0}, {1.5, 0.0}};
  std::vector<int> y = {1, 0, 1};
  CHECK(svm_objective(m, x, y) ==
        doctest::Approx(0.01 * 1.0 + 0.5 / 3.0).epsilon(1e-12));
  CHECK(svm_accuracy(m, x, y) == 1.0);

  // A positive point sitting exactly on the boundary scores as a miss.
  x.push_back({1.0, 0.0});
  y.push_back(1);
  CHECK(svm_accuracy(m, x, y) == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("training input validation") {
  std::vector<std::vector<double>> x = {{1.0}, {2.0}};
  CHECK(thrown_code([&] { train_svm({}, {}, 0.01, 10, 1); }) == ErrorCode::Validation);
  CHECK(thrown_code([&] { train_svm(x, {1}, 0.01, 10, 1); }) == ErrorCode::Arg);
  CHECK(thrown_code([&] { train_svm(x, {1, 2}, 0.01, 10, 1); }) == ErrorCode::Validation);
  CHECK(thrown_code([&] { train_svm(x, {1, 1}, 0.01, 10, 1); }) == ErrorCode::Validation);
  CHECK(thrown_code([&] { train_svm(x, {1, 0}, -0.5, 10, 1); }) == ErrorCode::Arg);
  CHECK(thrown_code([&] { train_svm(x, {1, 0}, 0.01, -1, 1); }) == ErrorCode::Arg);
}

TEST_CASE("contradictory duplicates of one point are flagged degenerate") {
  TrainResult bad = train_svm({{1.0}, {1.0}, {2.0}}, {0, 1, 1}, 0.01, 5, 1);
  CHECK(bad.degenerate);
  TrainResult good = train_svm({{1.0}, {2.0}}, {0, 1}, 0.01, 5, 1);
  CHECK_FALSE(good.degenerate);
}

TEST_CASE("training separates a hand-built square") {
  std::vector<std::vector<double>> x = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  std::vector<int> y = {0, 0, 1, 1};
  TrainResult res = train_svm(x, y, 0.01, 200, 42);

  CHECK(svm_accuracy(res.model, x, y) == 1.0);
  CHECK(res.epochs_run == 200);
  REQUIRE(res.losses.size() == 201);
  CHECK(res.losses[0] == doctest::Approx(1.0));  // the zero model pays full hinge everywhere
  for (size_t i = 1; i < res.losses.size(); ++i) CHECK(res.losses[i] <= res.losses[i - 1]);
  // The reported curve ends at the exact objective of the returned model.
  CHECK(res.losses.back() == doctest::Approx(svm_objective(res.model, x, y)).epsilon(1e-12));

  // The optimum separates on the first coordinate alone.
  MaxMarginResult mm = max_margin(x, y);
  REQUIRE(mm.found);
  CHECK(mm.w[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(mm.w[1] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(mm.b == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("training is reproducible under one seed") {
  SeparableSet s = random_separable(99, 30, 3, 0.2);
  TrainResult a = train_svm(s.x, s.y, 0.01, 50, 7);
  TrainResult b = train_svm(s.x, s.y, 0.01, 50, 7);
  CHECK(a.model.weights == b.model.weights);
  CHECK(a.model.bias == b.model.bias);
  CHECK(a.losses == b.losses);
}

TEST_CASE("trained labels match the exact max-margin separator") {
  for (uint64_t seed : {3u, 11u, 27u}) {
    CAPTURE(seed);
    SeparableSet s = random_separable(seed, 14, 2, 0.4);
    MaxMarginResult mm = max_margin(s.x, s.y);
    REQUIRE(mm.found);
    TrainResult res = train_svm(s.x, s.y, 0.01, 300, seed);
    for (size_t i = 0; i < s.x.size(); ++i) {
      double exact = mm.b;
      for (size_t d = 0; d < s.x[i].size(); ++d) exact += mm.w[d] * s.x[i][d];
      CHECK((exact > 0 ? 1 : 0) == s.y[i]);  // the oracle respects its own labels
      CHECK(svm_predict(res.model, s.x[i]) == s.y[i]);
    }
  }
}

TEST_CASE("feature scaling folds into the regularizer") {
  SeparableSet s = random_separable(5, 24, 3, 0.3);
  const double c = 10.0;
  std::vector<std::vector<double>> xs = s.x;
  for (auto& row : xs)
    for (double& v : row) v *= c;

  // Exact algebra: scaling features by c and weights by 1/c preserves every
  // margin, so the objective is unchanged when lambda grows by c^2.
  SvmModel m;
  m.lambda = 0.04;
  m.bias = 0.3;
  m.weights = {0.7, -1.1, 0.2};
  SvmModel ms;
  ms.lambda = m.lambda * c * c;
  ms.bias = m.bias;
  ms.weights = m.weights;
  for (double& w : ms.weights) w /= c;
  CHECK(svm_objective(ms, xs, s.y) ==
        doctest::Approx(svm_objective(m, s.x, s.y)).epsilon(1e-12));

  // At the sign level the inverse map also holds on separable data: shrink
  // lambda by c^2 and the scaled problem trains to the same labels.
  TrainResult plain = train_svm(s.x, s.y, 0.05, 300, 9);
  TrainResult scaled = train_svm(xs, s.y, 0.05 / (c * c), 300, 9);
  for (size_t i = 0; i < s.x.size(); ++i) {
    CHECK(svm_predict(plain.model, s.x[i]) == s.y[i]);
    CHECK(svm_predict(scaled.model, xs[i]) == s.y[i]);
  }
}

TEST_CASE("model files round-trip exactly") {
  SvmModel m;
  m.lambda = 0.015625;
  m.bias = -3.0000000000000004;
  m.weights = {4.4208809135399813, 0.0, -1.25e-17};
  SvmModel back = load_model(save_model(m));
  CHECK(back.lambda == m.lambda);
  CHECK(back.bias == m.bias);
  CHECK(back.weights == m.weights);

  CHECK(thrown_code([] { load_model("0.01\n"); }) == ErrorCode::Parse);
  CHECK(thrown_code([] { load_model("0.01\nzero\n1\n"); }) == ErrorCode::Parse);
  CHECK(thrown_code([] { load_model("0.01\n1.0 extra\n1\n"); }) == ErrorCode::Parse);
}

TEST_CASE("the bibliographic author pairs train to their labels") {
  std::string dir = std::string(ERBLOX_DATA_DIR) + "/fig4/";
  Schema schema = load_schema(read_file(dir + "schema.conf"));
  Instance inst;
  for (const char* rel : {"Author", "Paper", "PaperAuthor", "Conference", "Journal"}) {
    inst.relations[rel] = ingest_csv(read_file(dir + rel + ".csv"), rel, schema);
  }
  FeatureSlot name{"Author", {"Name", "", ""}, std::nullopt, Kernel::JaroWinkler,
                   SlotPolicy::Zero};
  FeatureSlot aff{"Author", {"Affiliation", "", ""}, std::nullopt, Kernel::TfIdfCosine,
                  SlotPolicy::Zero};
  FeatureExtractor ex(schema, inst, {name, aff}, "Author");

  auto labeled = load_labeled_pairs(read_file(dir + "train_Author.tsv"),
                                    inst.require("Author"));
  REQUIRE(labeled.size() == 4);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const auto& [r1, r2, label] : labeled) {
    auto v = ex.vector_for(r1, r2);
    REQUIRE(v.has_value());
    x.push_back(*v);
    y.push_back(label);
  }

  // The duplicate pair shares an exact name and a disjoint affiliation.
  auto dup = ex.vector_for(612, 4994);
  CHECK((*dup)[0] == doctest::Approx(1.0));
  CHECK((*dup)[1] == doctest::Approx(0.0));

  TrainResult res = train_svm(x, y, 0.01, 200, 1);
  CHECK(svm_accuracy(res.model, x, y) == 1.0);
  CHECK(svm_predict(res.model, *ex.vector_for(612, 4994)) == 1);
  CHECK(svm_predict(res.model, *ex.vector_for(659, 2546)) == 0);
  CHECK(svm_predict(res.model, *ex.vector_for(612, 659)) == 0);
}
