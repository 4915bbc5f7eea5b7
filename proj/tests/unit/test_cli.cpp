#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fundcast/errors.hpp"
#include "fundcast/evalkit.hpp"
#include "fundcast/schema.hpp"

using namespace fundcast;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

const std::string& cli_binary() {
    static const std::string bin = [] {
        const char* env = std::getenv("FUNDCAST_BIN");
        return std::string(env ? env : "");
    }();
    return bin;
}

RunResult run_cli(const std::string& args) {
    RunResult res;
    const std::string cmd = cli_binary() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) {
        res.output.append(buf.data(), got);
    }
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) nl = text.size();
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

// Scratch directory wiped once per process; subdirectories per test case.
fs::path scratch_dir(const std::string& name) {
    static const fs::path root = [] {
        fs::path r = fs::temp_directory_path() / "fundcast_cli_tests";
        fs::remove_all(r);
        fs::create_directories(r);
        return r;
    }();
    fs::path dir = root / name;
    fs::create_directories(dir);
    return dir;
}

// Shared generate -> train flow reused by the evaluate/sweep/predict cases.
struct TrainedFlow {
    fs::path dir;
    fs::path data_csv;
    fs::path model_json;
};

const TrainedFlow& trained_flow() {
    static const TrainedFlow flow = [] {
        TrainedFlow f;
        f.dir = scratch_dir("flow");
        f.data_csv = f.dir / "data.csv";
        f.model_json = f.dir / "model.json";

        RunResult gen = run_cli("generate --out " + f.data_csv.string() + " --n 400 --seed 33");
        REQUIRE_MESSAGE(gen.exit_code == 0, gen.output);

        RunResult trn = run_cli(
            "train --data " + f.data_csv.string() + " --out " + f.model_json.string() +
            " --seed 42 --folds 5 --gbt-trees 10 --gbt-depth 3 --gbt-subsample 1.0" +
            " --rf-trees 10 --rf-depth 6" +
            " --train-size 300 --eval-subsets 2 --subset-size 50");
        REQUIRE_MESSAGE(trn.exit_code == 0, trn.output);
        return f;
    }();
    return flow;
}

}  // namespace

TEST_CASE("cli help exits zero and usage errors exit one") {
    REQUIRE_MESSAGE(!cli_binary().empty(), "FUNDCAST_BIN must point at the cli binary");

    RunResult help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("generate") != std::string::npos);
    CHECK(help.output.find("predict") != std::string::npos);

    CHECK(run_cli("generate --help").exit_code == 0);

    // Missing subcommand, unknown subcommand, missing required option, and
    // an unparsable value are all usage errors.
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("generate").exit_code == 1);
    CHECK(run_cli("generate --out x.csv --n not_a_number").exit_code == 1);
    CHECK(run_cli("ablate --suite embeddings --out-dir x").exit_code == 1);
}

TEST_CASE("cli data errors exit two with a diagnostic") {
    const fs::path dir = scratch_dir("data_errors");

    RunResult missing = run_cli("train --data " + (dir / "nope.csv").string() + " --out " +
                                (dir / "m.json").string());
    CHECK(missing.exit_code == 2);
    CHECK(missing.output.find("error:") != std::string::npos);

    RunResult bad_model =
        run_cli("predict --model " + (dir / "no_model.json").string() + " --in " +
                (dir / "nope.csv").string() + " --out " + (dir / "p.csv").string());
    CHECK(bad_model.exit_code == 2);
    CHECK(bad_model.output.find("error:") != std::string::npos);

    RunResult bad_preset =
        run_cli("generate --out " + (dir / "g.csv").string() + " --preset mystery");
    CHECK(bad_preset.exit_code == 2);
    CHECK(bad_preset.output.find("mystery") != std::string::npos);

    RunResult bad_backend = run_cli("--kernel-backend warp generate --out " +
                                    (dir / "g2.csv").string() + " --n 200 --seed 1");
    CHECK(bad_backend.exit_code == 2);
    CHECK(bad_backend.output.find("warp") != std::string::npos);
}

TEST_CASE("generate is deterministic and writes its sidecars") {
    const fs::path dir = scratch_dir("generate");
    const fs::path a = dir / "a.csv";
    const fs::path b = dir / "b.csv";

    RunResult ra = run_cli("generate --out " + a.string() + " --n 300 --seed 5");
    REQUIRE_MESSAGE(ra.exit_code == 0, ra.output);
    CHECK(ra.output.find("generated 300 records") != std::string::npos);
    RunResult rb = run_cli("generate --out " + b.string() + " --n 300 --seed 5");
    REQUIRE_MESSAGE(rb.exit_code == 0, rb.output);

    CHECK(slurp(a) == slurp(b));
    CHECK(fs::exists(dir / "a.truth.json"));
    CHECK(fs::exists(dir / "a.run.json"));

    // A different seed must change the bytes.
    const fs::path c = dir / "c.csv";
    REQUIRE(run_cli("generate --out " + c.string() + " --n 300 --seed 6").exit_code == 0);
    CHECK(slurp(a) != slurp(c));

    // The scalar backend must produce the identical dataset.
    const fs::path d = dir / "d.csv";
    REQUIRE(run_cli("--kernel-backend scalar generate --out " + d.string() +
                    " --n 300 --seed 5")
                .exit_code == 0);
    CHECK(slurp(a) == slurp(d));
}

TEST_CASE("enrich with the mock provider reports its tallies and caches") {
    const fs::path dir = scratch_dir("enrich");
    const fs::path data = trained_flow().data_csv;
    const fs::path out1 = dir / "enriched1.csv";
    const fs::path out2 = dir / "enriched2.csv";
    const fs::path cache = dir / "cache.jsonl";

    RunResult first = run_cli("enrich --in " + data.string() + " --out " + out1.string() +
                              " --provider mock --cache " + cache.string());
    REQUIRE_MESSAGE(first.exit_code == 0, first.output);
    CHECK(first.output.find("cache hits 0") != std::string::npos);
    CHECK(fs::exists(cache));

    // Re-running against the same cache answers everything from disk.
    RunResult second = run_cli("enrich --in " + data.string() + " --out " + out2.string() +
                               " --provider mock --cache " + cache.string());
    REQUIRE_MESSAGE(second.exit_code == 0, second.output);
    CHECK(second.output.find("provider errors 0") != std::string::npos);
    const std::size_t hits_pos = second.output.find("cache hits ");
    REQUIRE(hits_pos != std::string::npos);
    CHECK(second.output.find("cache hits 0") == std::string::npos);

    CHECK(slurp(out1) == slurp(out2));

    RunResult none = run_cli("enrich --in " + data.string() + " --out " +
                             (dir / "plain.csv").string() + " --provider none");
    CHECK(none.exit_code == 0);
}

TEST_CASE("train then evaluate writes a loadable report bundle") {
    const TrainedFlow& f = trained_flow();
    CHECK(fs::exists(f.model_json));
    CHECK(fs::exists(f.dir / "model.run.json"));

    const fs::path out = scratch_dir("evaluate");
    RunResult ev = run_cli("evaluate --model " + f.model_json.string() + " --data " +
                           f.data_csv.string() + " --out-dir " + out.string() +
                           " --train-size 300 --eval-subsets 2 --subset-size 50");
    REQUIRE_MESSAGE(ev.exit_code == 0, ev.output);
    CHECK(ev.output.find("== Evaluation subsets ==") != std::string::npos);

    for (const char* name : {"report.json", "report.txt", "sweep.csv", "sensitivity.csv",
                             "run.json"}) {
        CAPTURE(name);
        CHECK(fs::exists(out / name));
    }

    const EvaluationReport report = EvaluationReport::from_json(slurp(out / "report.json"));
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].subset_id == "eval-1");
    CHECK(report.rows[1].subset_id == "eval-2");
    for (const auto& row : report.rows) {
        CHECK(row.n == 50);
        CHECK(row.mape_pct > 0.0);
    }
    CHECK(report.sweep.size() == default_sweep_grid().size());
    CHECK_FALSE(report.sensitivity_table.rows.empty());
    CHECK(report.config_fingerprint.size() == 16);

    const auto sweep_lines = lines_of(slurp(out / "sweep.csv"));
    REQUIRE(sweep_lines.size() == 1 + report.sweep.size());
    CHECK(sweep_lines[0] == "threshold,precision,precision_multiple,recall,n_predicted_positive");

    const auto sens_lines = lines_of(slurp(out / "sensitivity.csv"));
    CHECK(sens_lines[0] == "feature,share");
    CHECK(sens_lines.size() == 1 + report.sensitivity_table.rows.size());
}

TEST_CASE("sweep subcommand honors a custom grid") {
    const TrainedFlow& f = trained_flow();
    const fs::path out = scratch_dir("sweep");

    RunResult sw = run_cli("sweep --model " + f.model_json.string() + " --data " +
                           f.data_csv.string() + " --out-dir " + out.string() +
                           " --grid 0.6,0.8 --no-split");
    REQUIRE_MESSAGE(sw.exit_code == 0, sw.output);

    const auto rows = lines_of(slurp(out / "sweep.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].substr(0, 4) == "0.6,");
    CHECK(rows[2].substr(0, 4) == "0.8,");

    // Grid values outside (0, 1) are a data/config error, not a crash.
    RunResult bad = run_cli("sweep --model " + f.model_json.string() + " --data " +
                            f.data_csv.string() + " --out-dir " + out.string() +
                            " --grid 1.5 --no-split");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("sensitivity subcommand emits the ranking and optional stability") {
    const TrainedFlow& f = trained_flow();
    const fs::path out = scratch_dir("sensitivity");

    RunResult plain = run_cli("sensitivity --model " + f.model_json.string() + " --out-dir " +
                              out.string());
    REQUIRE_MESSAGE(plain.exit_code == 0, plain.output);
    CHECK(fs::exists(out / "sensitivity.csv"));
    CHECK(fs::exists(out / "sensitivity.json"));
    CHECK_FALSE(fs::exists(out / "stability.json"));

    // --stability without --data is a usage-level configuration error.
    RunResult no_data = run_cli("sensitivity --model " + f.model_json.string() + " --out-dir " +
                                out.string() + " --stability");
    CHECK(no_data.exit_code == 2);
    CHECK(no_data.output.find("--data") != std::string::npos);

    const fs::path out2 = scratch_dir("sensitivity_stability");
    RunResult stab = run_cli("sensitivity --model " + f.model_json.string() + " --data " +
                             f.data_csv.string() + " --out-dir " + out2.string() +
                             " --stability --fractions 0.0,0.05 --repeats 1 --seed 7" +
                             " --train-size 300 --eval-subsets 2 --subset-size 50");
    REQUIRE_MESSAGE(stab.exit_code == 0, stab.output);
    CHECK(fs::exists(out2 / "stability.json"));
    CHECK(stab.output.find("stability mean tau") != std::string::npos);
}

TEST_CASE("ablate subcommand writes the suite report") {
    const TrainedFlow& f = trained_flow();
    const fs::path out = scratch_dir("ablate");

    RunResult ab = run_cli("ablate --suite embeddings --data " + f.data_csv.string() +
                           " --out-dir " + out.string() +
                           " --seed 42 --folds 5 --gbt-trees 10 --gbt-subsample 1.0" +
                           " --rf-trees 10 --rf-depth 6" +
                           " --train-size 300 --eval-subsets 2 --subset-size 50");
    REQUIRE_MESSAGE(ab.exit_code == 0, ab.output);

    const EvaluationReport report = EvaluationReport::from_json(slurp(out / "ablation.json"));
    REQUIRE(report.ablations.size() == 1);
    CHECK(report.ablations[0].suite == "embeddings");
    REQUIRE(report.ablations[0].rows.size() == 2);
    CHECK(report.ablations[0].rows[0].variant == "mock");
    CHECK(report.ablations[0].rows[1].variant == "none");

    RunResult bad = run_cli("ablate --suite nonsense --data " + f.data_csv.string() +
                            " --out-dir " + out.string());
    CHECK(bad.exit_code == 2);
    CHECK(bad.output.find("nonsense") != std::string::npos);
}

TEST_CASE("predict writes one csv row per record") {
    const TrainedFlow& f = trained_flow();
    const fs::path dir = scratch_dir("predict");
    const fs::path out = dir / "pred.csv";

    RunResult pr = run_cli("predict --model " + f.model_json.string() + " --in " +
                           f.data_csv.string() + " --out " + out.string());
    REQUIRE_MESSAGE(pr.exit_code == 0, pr.output);
    CHECK(pr.output.find("predicted 400 records (0 failed)") != std::string::npos);

    const auto rows = lines_of(slurp(out));
    REQUIRE(rows.size() == 401);
    CHECK(rows[0] ==
          "id,funding_usd,log10_estimate,success_prob,predicted_success,funding_class,"
          "low_range,error");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::size_t commas =
            static_cast<std::size_t>(std::count(rows[i].begin(), rows[i].end(), ','));
        REQUIRE_MESSAGE(commas == 7, "row ", i, ": ", rows[i]);
    }
    CHECK(fs::exists(dir / "pred.run.json"));

    // Determinism across invocations.
    const fs::path out2 = dir / "pred2.csv";
    REQUIRE(run_cli("predict --model " + f.model_json.string() + " --in " +
                    f.data_csv.string() + " --out " + out2.string())
                .exit_code == 0);
    CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("schema mismatch against the artifact names both hashes") {
    const TrainedFlow& f = trained_flow();
    const fs::path dir = scratch_dir("schema_mismatch");

    FeatureSchema trimmed = default_schema().filtered(
        [](const FeatureDecl& d) { return d.name != "press_mentions"; });
    if (trimmed.features.size() == default_schema().features.size()) {
        // Fall back to dropping the last feature if the name above ever moves.
        trimmed.features.pop_back();
    }
    const fs::path schema_path = dir / "other_schema.json";
    trimmed.save(schema_path.string());

    RunResult res = run_cli("predict --model " + f.model_json.string() + " --in " +
                            f.data_csv.string() + " --out " + (dir / "p.csv").string() +
                            " --schema " + schema_path.string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("schema hash mismatch") != std::string::npos);
    CHECK(res.output.find(trimmed.hash()) != std::string::npos);
    CHECK(res.output.find(default_schema().hash()) != std::string::npos);

    // The matching schema passes the check.
    const fs::path same_path = dir / "same_schema.json";
    default_schema().save(same_path.string());
    RunResult ok = run_cli("predict --model " + f.model_json.string() + " --in " +
                           f.data_csv.string() + " --out " + (dir / "p2.csv").string() +
                           " --schema " + same_path.string());
    CHECK(ok.exit_code == 0);
}
