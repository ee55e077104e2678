// Config loading and staged engine runs over the shipped corpora.
#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "core/config.h"
#include "core/csv.h"
#include "core/error.h"
#include "core/pipeline.h"
#include "doctest.h"
#include "support/checks.h"

using namespace erblox;
using erblox::testing::ScratchDir;
using erblox::testing::thrown_code;
using erblox::testing::thrown_message;

namespace {

std::string fig4_conf() { return std::string(ERBLOX_DATA_DIR) + "/fig4/pipeline.conf"; }

std::set<std::string> basenames(const std::vector<std::string>& paths) {
  std::set<std::string> out;
  for (const std::string& p : paths) out.insert(std::filesystem::path(p).filename().string());
  return out;
}

// A one-relation corpus exercising relative path resolution from a subdir.
void write_mini_corpus(const ScratchDir& dir) {
  std::filesystem::create_directories(dir.file("input"));
  write_file(dir.file("input/schema.conf"), "relation R(ID: key, T: text)\n");
  write_file(dir.file("input/R.csv"),
             "1,alpha beta gamma\n2,alpha beta gamma delta\n3,omega psi\n4,omega psi chi\n"
             "5,unrelated words here\n");
  write_file(dir.file("input/rules.mds"),
             "block R r1, R r2 when sim(r1.T, r2.T, tSim) then block(r1) = block(r2);\n"
             "merge R using match(T) = longest;\n");
  write_file(dir.file("input/train.tsv"), "1\t2\t1\n3\t4\t1\n1\t3\t0\n2\t5\t0\n4\t5\t0\n");
  write_file(dir.file("input/gold.tsv"), "1\t2\n3\t4\n");
  write_file(dir.file("pipeline.conf"),
             "schema input/schema.conf\n"
             "data R input/R.csv\n"
             "mds input/rules.mds\n"
             "sim tSim R.T tfidf-cosine 0.5\n"
             "feature R R.T using tfidf-cosine policy zero\n"
             "training R input/train.tsv\n"
             "gold R input/gold.tsv\n"
             "standard-key R tSim\n"
             "split 1.0\n"
             "blocking both\n");
}

}  // namespace

TEST_CASE("config directives parse with defaults filled in") {
  PipelineConfig cfg = load_pipeline_config(fig4_conf());
  CHECK(cfg.schema_path == std::string(ERBLOX_DATA_DIR) + "/fig4/schema.conf");
  REQUIRE(cfg.data.size() == 5);
  CHECK(cfg.data[0].first == "Author");  // file order, not alphabetical
  CHECK(cfg.data[0].second == std::string(ERBLOX_DATA_DIR) + "/fig4/Author.csv");
  REQUIRE(cfg.sims.size() == 3);
  CHECK(cfg.sims[0].name == "titleSim");
  CHECK(cfg.sims[0].kernel == Kernel::TfIdfCosine);
  CHECK(cfg.sims[0].threshold == 0.7);
  REQUIRE(cfg.features.size() == 6);
  CHECK(cfg.features[2].primary.join_relation == "Conference");
  REQUIRE(cfg.features[2].fallback.has_value());
  CHECK(cfg.features[2].fallback->join_relation == "Journal");
  CHECK(cfg.features[2].policy == SlotPolicy::Substitute);
  CHECK(cfg.training.at("Author") == std::string(ERBLOX_DATA_DIR) + "/fig4/train_Author.tsv");
  CHECK(cfg.standard_keys.at("Author") == std::vector<std::string>{"nameSim", "affSim"});
  CHECK(cfg.split == 1.0);
  CHECK(cfg.blocking == BlockingMode::Both);

  // Directives the file does not set keep their defaults.
  CHECK(cfg.lambda == 0.01);
  CHECK(cfg.epochs == 200);
  CHECK(cfg.seed == 1);
  CHECK_FALSE(cfg.simcache_filter);
}

TEST_CASE("config rejections carry the line number") {
  ScratchDir dir("erblox_conf");
  auto reject = [&](const std::string& text, ErrorCode code) {
    write_file(dir.file("bad.conf"), text);
    CAPTURE(text);
    CHECK(thrown_code([&] { load_pipeline_config(dir.file("bad.conf")); }) == code);
  };
  reject("schema a.conf\nbogus directive\n", ErrorCode::Parse);
  reject("blocking sideways\n", ErrorCode::Parse);
  reject("sim tSim R.T tfidf-cosine notanumber\n", ErrorCode::Parse);
  reject("feature R R.T using tfidf-cosine\n", ErrorCode::Parse);  // missing policy
  reject("lambda\n", ErrorCode::Parse);

  write_file(dir.file("bad.conf"), "schema a.conf\nbogus directive\n");
  std::string msg = thrown_message([&] { load_pipeline_config(dir.file("bad.conf")); });
  CHECK(msg.find("line 2") != std::string::npos);

  CHECK(parse_blocking_mode("standard") == BlockingMode::Standard);
  CHECK(blocking_mode_name(BlockingMode::Both) == "both");
  CHECK(thrown_code([] { parse_blocking_mode("all"); }) == ErrorCode::Parse);
}

TEST_CASE("stages write exactly their own artifacts") {
  ScratchDir out("erblox_stages");
  Engine eng;
  CHECK(thrown_code([&] { eng.run_stage("ingest"); }) == ErrorCode::State);
  eng.load_config(fig4_conf());
  eng.set_out_dir(out.str());
  CHECK(thrown_code([&] { eng.run_stage("resolve"); }) == ErrorCode::Arg);
  CHECK(thrown_code([&] { eng.set_out_dir(""); }) == ErrorCode::Arg);

  SUBCASE("ingest reports row counts, null density, and dangling refs") {
    auto arts = eng.run_stage("ingest");
    CHECK(basenames(arts) == std::set<std::string>{"validation_report.txt"});
    std::string rep = read_file(arts[0]);
    CHECK(rep.find("rows.Paper=4\n") != std::string::npos);
    CHECK(rep.find("null_density.Paper.JID=1.000000\n") != std::string::npos);
    CHECK(rep.find("dangling_count=0\n") != std::string::npos);
  }

  SUBCASE("simcache dumps pairs and a count report") {
    auto arts = eng.run_stage("simcache");
    CHECK(basenames(arts) == std::set<std::string>{"simcache.tsv", "simcache_report.txt"});
    std::string rep = read_file(arts[1]);
    CHECK(rep.find("pairs.titleSim=2\n") != std::string::npos);
    CHECK(rep.find("pairs.nameSim=") != std::string::npos);
    std::string tsv = read_file(arts[0]);
    CHECK(tsv.find("Paper\tTitle\t") != std::string::npos);
  }

  SUBCASE("block writes per-mode blocks, lineage, and candidates") {
    auto arts = eng.run_stage("block");
    CHECK(basenames(arts) ==
          std::set<std::string>{"blocks_standard.tsv", "lineage_standard.tsv",
                                "candidates_standard.tsv", "blocks_md.tsv", "lineage_md.tsv",
                                "candidates_md.tsv"});
    std::string md_cands = read_file(out.file("candidates_md.tsv"));
    CHECK(md_cands == "Author\t612\t4994\nPaper\t123\t205\nPaper\t195\t769\n");
    // Standard blocking misses the author pair: the affiliations disagree.
    std::string std_cands = read_file(out.file("candidates_standard.tsv"));
    CHECK(std_cands == "Paper\t123\t205\nPaper\t195\t769\n");
    // The collective chase shows up in the lineage, not the standard one.
    CHECK(read_file(out.file("lineage_md.tsv")).find("\t4\t612\t4994\t") != std::string::npos);
    CHECK(read_file(out.file("lineage_standard.tsv")).find("612") == std::string::npos);
  }

  SUBCASE("train writes a model and a report per configured relation") {
    auto arts = eng.run_stage("train");
    CHECK(basenames(arts) ==
          std::set<std::string>{"model_Author.txt", "model_Paper.txt",
                                "training_report_Author.txt", "training_report_Paper.txt"});
    std::string rep = read_file(out.file("training_report_Author.txt"));
    CHECK(rep.find("degenerate=0\n") != std::string::npos);
    CHECK(rep.find("train_accuracy=1.000000\n") != std::string::npos);
    CHECK(rep.find("labeled_pairs=4\n") != std::string::npos);
    CHECK(rep.find("eval_accuracy=undefined\n") != std::string::npos);  // split 1.0
    CHECK(rep.find("seed=1\n") != std::string::npos);
    // The model artifact reloads into the engine's in-memory model.
    SvmModel from_file = load_model(read_file(out.file("model_Author.txt")));
    REQUIRE(eng.model("Author") != nullptr);
    CHECK(from_file.weights == eng.model("Author")->weights);
    CHECK(eng.model("Conference") == nullptr);
  }

  SUBCASE("classify separates duplicates from skipped pairs") {
    auto arts = eng.run_stage("classify");
    CHECK(basenames(arts) == std::set<std::string>{"duplicates.tsv", "skipped_pairs.tsv"});
    CHECK(read_file(out.file("duplicates.tsv")) ==
          "Author\t612\t4994\nPaper\t123\t205\nPaper\t195\t769\n");
    CHECK(read_file(out.file("skipped_pairs.tsv")).empty());
  }

  SUBCASE("merge resolves every relation and names survivors") {
    auto arts = eng.run_stage("merge");
    auto names = basenames(arts);
    CHECK(names.count("resolved_Author.csv") == 1);
    CHECK(names.count("resolved_full_Paper.csv") == 1);
    CHECK(names.count("survivors.tsv") == 1);
    CHECK(names.size() == 11);  // two files per relation plus the survivor map

    // The Roeckl authors fuse; the longest affiliation survives on the
    // canonical record, which keeps the least rid of its component.
    std::string canonical = read_file(out.file("resolved_Author.csv"));
    CHECK(canonical.find("612,Matthias Roeckl,Institute of Communications\n") !=
          std::string::npos);
    CHECK(canonical.find("4994,") == std::string::npos);
    std::string survivors = read_file(out.file("survivors.tsv"));
    CHECK(survivors.find("Author\t4994\t612\n") != std::string::npos);
    CHECK(survivors.find("Paper\t205\t123\n") != std::string::npos);

    // Untouched relations resolve to themselves, re-serialized in rid order.
    CHECK(read_file(out.file("resolved_Conference.csv")) ==
          "146,,First C2C-CC-COMeSafety Simulation,\n179,,Medical Anthropology,medant.com\n");
  }

  SUBCASE("evaluate renders metrics per active blocking mode") {
    auto arts = eng.run_stage("evaluate");
    CHECK(basenames(arts) == std::set<std::string>{"metrics.txt"});
    std::string text = read_file(arts[0]);
    CHECK(text.find("md.Author.recall=1.000000\n") != std::string::npos);
    CHECK(text.find("standard.Author.recall=0.000000\n") != std::string::npos);
    CHECK(text.find("md.Paper.recall=1.000000\n") != std::string::npos);
    CHECK(text.find("md.total.") != std::string::npos);
  }

  SUBCASE("the pipeline stage runs everything in order") {
    auto arts = eng.run_stage("pipeline");
    auto names = basenames(arts);
    CHECK(names.count("validation_report.txt") == 1);
    CHECK(names.count("metrics.txt") == 1);
    CHECK(names.count("duplicates.tsv") == 1);
    REQUIRE(eng.blocked_instance("md") != nullptr);
    CHECK(eng.blocked_instance("md")->require("Author").require(612).block == 4994);
    CHECK(eng.blocked_instance("bogus") == nullptr);
  }
}

TEST_CASE("a single blocking mode writes only its own outputs") {
  ScratchDir out("erblox_mode");
  Engine eng;
  eng.load_config(fig4_conf());
  eng.set_out_dir(out.str());
  eng.set_blocking_mode("standard");
  auto arts = eng.run_stage("block");
  CHECK(basenames(arts) == std::set<std::string>{"blocks_standard.tsv", "lineage_standard.tsv",
                                                 "candidates_standard.tsv"});
  CHECK(eng.blocked_instance("md") == nullptr);
  CHECK(thrown_code([&] { eng.set_blocking_mode("everything"); }) == ErrorCode::Parse);
}

TEST_CASE("classification prefers memory, then model files, then training") {
  ScratchDir out("erblox_precedence");

  // Seed the output directory with a model that calls nothing a duplicate:
  // a fresh engine must pick it up instead of retraining.
  SvmModel reject_all;
  reject_all.lambda = 0.01;
  reject_all.bias = -100.0;
  reject_all.weights = {0.0, 0.0};
  write_file(out.file("model_Author.txt"), save_model(reject_all));
  SvmModel accept_none_paper;
  accept_none_paper.lambda = 0.01;
  accept_none_paper.bias = -100.0;
  accept_none_paper.weights = {0.0, 0.0, 0.0, 0.0};
  write_file(out.file("model_Paper.txt"), save_model(accept_none_paper));

  Engine eng;
  eng.load_config(fig4_conf());
  eng.set_out_dir(out.str());
  eng.run_stage("classify");
  CHECK(read_file(out.file("duplicates.tsv")).empty());

  // Explicit training replaces the files, and reclassification sees the
  // freshly trained models.
  eng.run_stage("train");
  eng.run_stage("classify");
  CHECK(read_file(out.file("duplicates.tsv")) ==
        "Author\t612\t4994\nPaper\t123\t205\nPaper\t195\t769\n");
}

TEST_CASE("a relation with neither model file nor training data cannot classify") {
  ScratchDir dir("erblox_nomodel");
  write_mini_corpus(dir);
  // Strip the training directive.
  std::string conf = read_file(dir.file("pipeline.conf"));
  std::string filtered;
  for (size_t pos = 0; pos < conf.size();) {
    size_t end = conf.find('\n', pos);
    std::string line = conf.substr(pos, end - pos);
    if (line.rfind("training", 0) != 0) filtered += line + "\n";
    pos = end + 1;
  }
  write_file(dir.file("pipeline.conf"), filtered);

  Engine eng;
  eng.load_config(dir.file("pipeline.conf"));
  eng.set_out_dir(dir.file("out"));
  std::string msg = thrown_message([&] { eng.run_stage("classify"); });
  CHECK(msg.find("no model file and no training data") != std::string::npos);
}

TEST_CASE("a fresh corpus runs end to end from a relative config") {
  ScratchDir dir("erblox_mini");
  write_mini_corpus(dir);
  Engine eng;
  eng.load_config(dir.file("pipeline.conf"));
  eng.set_out_dir(dir.file("out"));
  auto arts = eng.run_stage("pipeline");
  CHECK(basenames(arts).count("metrics.txt") == 1);

  // Rows 1/2 and 3/4 pair up; 5 shares no tokens with anything.
  CHECK(read_file(dir.file("out/duplicates.tsv")) == "R\t1\t2\nR\t3\t4\n");
  std::string metrics = read_file(dir.file("out/metrics.txt"));
  CHECK(metrics.find("md.R.recall=1.000000\n") != std::string::npos);
  CHECK(metrics.find("md.R.precision=1.000000\n") != std::string::npos);
  // The longest title wins both merges.
  std::string resolved = read_file(dir.file("out/resolved_R.csv"));
  CHECK(resolved.find("1,alpha beta gamma delta\n") != std::string::npos);
  CHECK(resolved.find("3,omega psi chi\n") != std::string::npos);
  CHECK(resolved.find("5,unrelated words here\n") != std::string::npos);
}

TEST_CASE("one seed, one result") {
  ScratchDir a("erblox_det_a");
  ScratchDir b("erblox_det_b");
  auto run = [](const std::string& out_dir, uint64_t seed) {
    Engine eng;
    eng.load_config(fig4_conf());
    eng.set_out_dir(out_dir);
    eng.set_seed(seed);
    eng.run_stage("pipeline");
  };
  run(a.str(), 17);
  run(b.str(), 17);
  for (const char* name :
       {"metrics.txt", "duplicates.tsv", "survivors.tsv", "resolved_Author.csv",
        "resolved_full_Paper.csv", "model_Author.txt", "training_report_Paper.txt",
        "blocks_md.tsv", "lineage_md.tsv", "simcache.tsv"}) {
    CAPTURE(name);
    CHECK(read_file(a.file(name)) == read_file(b.file(name)));
  }
  // The seed override lands in the training report.
  CHECK(read_file(a.file("training_report_Author.txt")).find("seed=17\n") !=
        std::string::npos);
}
