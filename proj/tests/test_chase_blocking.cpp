// The blocking chase: collective fixpoint, standard baseline, and
// equivalence with literal single-step application.
#include <map>
#include <set>
#include <string>
#include <vector>

#include "core/chase.h"
#include "core/csv.h"
#include "core/error.h"
#include "core/instance.h"
#include "core/mdeval.h"
#include "core/mdlang.h"
#include "core/schema.h"
#include "core/similarity.h"
#include "doctest.h"
#include "support/checks.h"
#include "support/naive_eval.h"
#include "support/oracle_chase.h"
#include "support/random_instances.h"

using namespace erblox;
using namespace erblox::testing;

namespace {

struct Fig4 {
  Schema schema;
  Instance instance;
  std::vector<SimSpec> specs;
  SimCache cache;
  md::MDSet mds;
};

Fig4 load_fig4() {
  Fig4 f;
  std::string dir = std::string(ERBLOX_DATA_DIR) + "/fig4/";
  f.schema = load_schema(read_file(dir + "schema.conf"));
  for (const char* rel : {"Author", "Paper", "PaperAuthor", "Conference", "Journal"}) {
    f.instance.relations[rel] = ingest_csv(read_file(dir + rel + ".csv"), rel, f.schema);
  }
  f.specs = {{"titleSim", "Paper", "Title", Kernel::TfIdfCosine, 0.7},
             {"nameSim", "Author", "Name", Kernel::JaroWinkler, 0.8},
             {"affSim", "Author", "Affiliation", Kernel::TfIdfCosine, 0.6}};
  f.cache = build_sim_cache(f.instance, f.specs);
  f.mds = md::parse_mds(read_file(dir + "rules.mds"));
  md::validate_mds(f.mds, f.schema, f.specs);
  return f;
}

int64_t block_of(const Instance& inst, const std::string& rel, int64_t rid) {
  return inst.require(rel).require(rid).block;
}

}  // namespace

TEST_CASE("bibliographic sample blocks collectively") {
  Fig4 f = load_fig4();
  ChaseResult res = enforce_blocking(f.instance, f.mds, f.schema, f.cache);

  // Both title pairs clear the same-venue rule; the Roeckl authors join only
  // through their co-blocked papers (their affiliations share no token).
  CHECK(block_of(f.instance, "Paper", 123) == block_of(f.instance, "Paper", 205));
  CHECK(block_of(f.instance, "Paper", 195) == block_of(f.instance, "Paper", 769));
  CHECK(block_of(f.instance, "Paper", 123) != block_of(f.instance, "Paper", 195));
  CHECK(block_of(f.instance, "Author", 612) == block_of(f.instance, "Author", 4994));
  CHECK(block_of(f.instance, "Author", 659) != block_of(f.instance, "Author", 2546));
  CHECK(block_of(f.instance, "Author", 659) != block_of(f.instance, "Author", 612));

  // Blocks merge toward the larger rid.
  CHECK(block_of(f.instance, "Paper", 123) == 205);
  CHECK(block_of(f.instance, "Paper", 195) == 769);
  CHECK(block_of(f.instance, "Author", 612) == 4994);

  // The author merge is collective: its lineage entry cites the rule that
  // reads paper blocks, after the paper merges it depends on.
  REQUIRE(res.lineage.size() == 3);
  CHECK(res.lineage[0].md_id == 1);
  CHECK(res.lineage[1].md_id == 1);
  const LineageEntry& author_merge = res.lineage[2];
  CHECK(author_merge.md_id == 4);
  CHECK(author_merge.rid1 == 612);
  CHECK(author_merge.rid2 == 4994);
  CHECK(author_merge.old1 == 612);
  CHECK(author_merge.old2 == 4994);
  CHECK(author_merge.merged == 4994);
  CHECK(res.rounds == 2);  // one productive pass, one quiet pass

  auto cands = candidate_pairs(f.instance);
  CHECK(cands["Paper"] ==
        std::vector<std::pair<int64_t, int64_t>>{{123, 205}, {195, 769}});
  CHECK(cands["Author"] == std::vector<std::pair<int64_t, int64_t>>{{612, 4994}});
  CHECK(cands["PaperAuthor"].empty());

  // Untouched relations keep rid-valued blocks.
  CHECK(block_of(f.instance, "Conference", 179) == 179);
  CHECK(block_of(f.instance, "Journal", 189) == 189);

  std::string lineage_dump = dump_lineage(res.lineage);
  CHECK(lineage_dump.find("3\t4\t612\t4994\t612\t4994\t4994\n") != std::string::npos);
  std::string blocks_dump = dump_blocks(f.instance);
  CHECK(blocks_dump.find("Author\t612\t4994\n") != std::string::npos);
  CHECK(blocks_dump.find("Paper\t123\t205\n") != std::string::npos);
}

TEST_CASE("chase is deterministic") {
  Fig4 a = load_fig4();
  Fig4 b = load_fig4();
  ChaseResult ra = enforce_blocking(a.instance, a.mds, a.schema, a.cache);
  ChaseResult rb = enforce_blocking(b.instance, b.mds, b.schema, b.cache);
  CHECK(dump_blocks(a.instance) == dump_blocks(b.instance));
  CHECK(dump_lineage(ra.lineage) == dump_lineage(rb.lineage));
}

TEST_CASE("standard baseline conjoins the key similarities per relation") {
  Fig4 f = load_fig4();
  md::MDSet standard = synthesize_standard_mds(
      f.schema, f.specs, {{"Paper", {"titleSim"}}, {"Author", {"nameSim", "affSim"}}});
  CHECK(standard.validated);
  REQUIRE(standard.mds.size() == 2);
  for (const md::BlockingMD& rule : standard.mds) {
    for (const md::Cond& c : rule.conds) CHECK(std::holds_alternative<md::SimAtom>(c));
  }

  enforce_blocking(f.instance, standard, f.schema, f.cache);
  auto cands = candidate_pairs(f.instance);
  // Title similarity alone finds both paper pairs, but the affiliation
  // conjunct blocks the Roeckl authors apart: standard blocking misses the
  // pair the collective rules recover.
  CHECK(cands["Paper"] ==
        std::vector<std::pair<int64_t, int64_t>>{{123, 205}, {195, 769}});
  CHECK(cands["Author"].empty());

  CHECK(thrown_code([&] { synthesize_standard_mds(f.schema, f.specs, {{"Paper", {}}}); }) ==
        ErrorCode::Arg);
  CHECK(thrown_code([&] {
          synthesize_standard_mds(f.schema, f.specs, {{"Paper", {"ghostSim"}}});
        }) == ErrorCode::Arg);
}

TEST_CASE("chase preconditions") {
  Fig4 f = load_fig4();
  md::MDSet unvalidated = md::parse_mds(read_file(std::string(ERBLOX_DATA_DIR) +
                                                  "/fig4/rules.mds"));
  CHECK(thrown_code([&] { enforce_blocking(f.instance, unvalidated, f.schema, f.cache); }) ==
        ErrorCode::State);
  CHECK(match_bl(3, 7) == 7);
  CHECK(thrown_code([] { match_bl(0, 7); }) == ErrorCode::Arg);
}

TEST_CASE("fixpoint equals literal one-step application in any order") {
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    CAPTURE(seed);
    RandomCase c = random_case(seed);
    Instance chased = c.instance;
    enforce_blocking(chased, c.mds, c.schema, c.cache);
    for (uint64_t order = 0; order < 3; ++order) {
      auto oracle = literal_chase(c.instance, c.mds, c.cache, seed * 1000 + order);
      for (const auto& [name, rel] : chased.relations) {
        for (const Record& r : rel.rows) {
          CAPTURE(name);
          CAPTURE(r.rid);
          REQUIRE(oracle.at(name).at(r.rid) == r.block);
        }
      }
    }
  }
}

TEST_CASE("compiled rule plans match the naive enumerator") {
  for (uint64_t seed = 50; seed <= 75; ++seed) {
    CAPTURE(seed);
    RandomCase c = random_case(seed);

    // Once against the ingestion blocks, once against the chased fixpoint:
    // block-equality conditions see both extremes.
    Instance chased = c.instance;
    enforce_blocking(chased, c.mds, c.schema, c.cache);
    for (const Instance* snapshot : {&c.instance, &chased}) {
      md::EvalContext ctx(*snapshot);
      auto blocks = [&](const std::string& rel, int64_t rid) {
        return snapshot->require(rel).require(rid).block;
      };
      for (const md::BlockingMD& rule : c.mds.mds) {
        CAPTURE(rule.id);
        md::CompiledMD plan = md::compile_md(rule, c.schema);
        REQUIRE(md::evaluate_md(plan, ctx, c.cache, blocks) ==
                naive_evaluate_md(rule, *snapshot, c.cache, blocks));
      }
    }
  }
}

TEST_CASE("final blocks name the largest member of each component") {
  for (uint64_t seed = 80; seed <= 100; ++seed) {
    CAPTURE(seed);
    RandomCase c = random_case(seed);
    enforce_blocking(c.instance, c.mds, c.schema, c.cache);
    for (const auto& [name, rel] : c.instance.relations) {
      std::map<int64_t, std::set<int64_t>> members;
      for (const Record& r : rel.rows) members[r.block].insert(r.rid);
      for (const auto& [block, rids] : members) {
        CAPTURE(name);
        CHECK(block == *rids.rbegin());  // the block number is its largest rid
      }
    }
  }
}
