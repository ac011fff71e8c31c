#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "lensless/experiment.hpp"
#include "lensless/phantom.hpp"
#include "lensless/tv.hpp"

using namespace lensless;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const std::string& out) {
  ExperimentConfig c;
  c.width = c.height = 32;
  c.ratios = {0.5};
  c.modes = {ModeSpec::parse("speckle:1")};
  c.trials = 1;
  c.threads = 1;
  c.solver.rho_points = 4;
  c.output_dir = (fs::temp_directory_path() / out).string();
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("phantom is deterministic, in [0, 1], and textured") {
  const ImageGrid g(128, 128);
  const auto a = make_phantom(g, RandomStream(1));
  CHECK(a.data() == make_phantom(g, RandomStream(1)).data());
  CHECK(a.data() != make_phantom(g, RandomStream(2)).data());
  for (double v : a.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  const double tv = tv_norm(a) / static_cast<double>(g.size());
  MESSAGE("phantom TV per pixel " << tv);
  CHECK(tv > 0.001);
  CHECK(tv < 0.5);
}

TEST_CASE("rescale_unit") {
  const auto u = rescale_unit(RasterImage(ImageGrid(3, 1), {2, 4, 6}));
  CHECK(u.data() == std::vector<double>{0, 0.5, 1});
  const auto flat = rescale_unit(RasterImage(ImageGrid(2, 1), 5.0));
  CHECK(flat.data() == std::vector<double>{0, 0});
}

TEST_CASE("ModeSpec parse and labels") {
  CHECK(ModeSpec::parse("focused").label() == "focused");
  CHECK(ModeSpec::parse("speckle:4").patterns == 4);
  CHECK_THROWS(ModeSpec::parse("speckle"));
  CHECK(ModeSpec::parse("speckle:2").name() == "speckle");
  CHECK_THROWS(ModeSpec::parse("focused:2"));
  CHECK_THROWS(ModeSpec::parse("laser"));
  CHECK_THROWS(ModeSpec::parse("speckle:0"));
}

TEST_CASE("ExperimentConfig validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.trials = 0;
  CHECK_THROWS(c.validate());
  c = {};
  c.ratios = {0.0};
  CHECK_THROWS(c.validate());
  c = {};
  c.ratios = {1.2};
  CHECK_THROWS(c.validate());
}

TEST_CASE("trial seeds are distinct across cells") {
  std::set<std::uint64_t> seeds;
  const ExperimentConfig c;
  for (const auto& m : c.modes) {
    for (double r : c.ratios) {
      for (int t = 0; t < c.trials; ++t) seeds.insert(trial_seed(c.base_seed, m, r, t));
    }
  }
  CHECK(seeds.size() == 800);
}

TEST_CASE("run_cell basics") {
  const auto c = small_config("lensless_cell");
  const auto truth = load_ground_truth(c);
  const auto a = run_cell(truth, c, ModeSpec::parse("focused"), 1.0, 0);
  CHECK(a.row.achieved_ratio == 1.0);
  CHECK(a.row.patterns == 1);
  CHECK(a.row.mode == "focused");
  const auto t0 = run_cell(truth, c, ModeSpec::parse("speckle:2"), 0.5, 0);
  const auto t1 = run_cell(truth, c, ModeSpec::parse("speckle:2"), 0.5, 1);
  CHECK(t0.row.achieved_ratio == t1.row.achieved_ratio);
  CHECK(t0.row.seed != t1.row.seed);
  CHECK(t0.record.y != t1.record.y);
  CHECK(t0.row.snr_full_db != t1.row.snr_full_db);
}

TEST_CASE("noiseless speckle reconstruction is well above 10 dB") {
  auto c = small_config("lensless_noiseless");
  c.width = c.height = 64;
  c.bsnr_db = kNoiselessBsnr;
  const auto truth = load_ground_truth(c);
  const auto o = run_cell(truth, c, ModeSpec::parse("speckle:1"), 1.0, 0);
  MESSAGE("noiseless speckle SNR " << o.row.snr_full_db);
  CHECK(std::isfinite(o.row.snr_full_db));
  CHECK(o.row.snr_full_db > 10.0);
  CHECK(o.row.bsnr_db == kNoiselessBsnr);
}

TEST_CASE("build_model follows the redraw flag") {
  auto c = small_config("lensless_model");
  const auto mode = ModeSpec::parse("speckle:2");
  const auto a = build_model(c, mode, 0.5, trial_seed(c.base_seed, mode, 0.5, 0));
  const auto b = build_model(c, mode, 0.5, trial_seed(c.base_seed, mode, 0.5, 1));
  CHECK(a.kernels.size() == 2);
  CHECK(a.kernels[0].image().data() != b.kernels[0].image().data());
  c.redraw_speckles = false;
  const auto f0 = build_model(c, mode, 0.5, trial_seed(c.base_seed, mode, 0.5, 0));
  const auto f1 = build_model(c, mode, 0.5, trial_seed(c.base_seed, mode, 0.5, 1));
  CHECK(f0.kernels[0].image().data() == f1.kernels[0].image().data());
  const auto focused = build_model(c, ModeSpec::parse("focused"), 0.5, 1);
  CHECK(focused.kernels.size() == 1);
  CHECK(focused.kernels[0].kind() == KernelKind::kFocused);
}

TEST_CASE("a sweep with one cell yields one row") {
  const auto c = small_config("lensless_one");
  const auto r = run_sweep(c);
  CHECK(r.rows.size() == 1);
  CHECK(r.failures.empty());
  REQUIRE(r.aggregates.size() == 1);
  CHECK(r.aggregates[0].count == 1);
  CHECK(r.aggregates[0].std_snr_db == 0.0);
}

TEST_CASE("the default configuration enumerates 800 cells") {
  const ExperimentConfig c;
  CHECK(c.ratios.size() * c.modes.size() * static_cast<std::size_t>(c.trials) == 800);
}

TEST_CASE("aggregates match an independent recomputation") {
  auto c = small_config("lensless_agg");
  c.ratios = {0.4, 1.0};
  c.modes = {ModeSpec::parse("focused"), ModeSpec::parse("speckle:2")};
  c.trials = 3;
  const auto r = run_sweep(c);
  REQUIRE(r.rows.size() == 12);
  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  for (const auto& row : r.rows) groups[{row.mode + std::to_string(row.patterns), row.requested_ratio}].push_back(row.snr_full_db);
  REQUIRE(r.aggregates.size() == groups.size());
  for (const auto& a : r.aggregates) {
    const auto& v = groups.at({a.mode + std::to_string(a.patterns), a.requested_ratio});
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(a.count == v.size());
    CHECK(a.mean_snr_db == doctest::Approx(mean).epsilon(1e-12));
    CHECK(a.std_snr_db == doctest::Approx(std::sqrt(ss / static_cast<double>(v.size() - 1))).epsilon(1e-12));
  }
}

TEST_CASE("sweep tables are reproducible and round-trip") {
  auto c = small_config("lensless_tables_a");
  c.ratios = {0.3, 0.8};
  c.modes = {ModeSpec::parse("focused"), ModeSpec::parse("speckle:1")};
  c.trials = 2;
  c.write_images = true;
  const auto first = run_sweep(c);
  write_sweep_outputs(c, first);
  auto d = c;
  d.output_dir = (fs::temp_directory_path() / "lensless_tables_b").string();
  d.threads = 2;
  d.write_images = false;
  write_sweep_outputs(d, run_sweep(d));
  const auto a = fs::path(c.output_dir), b = fs::path(d.output_dir);
  CHECK(slurp(a / "results.tsv") == slurp(b / "results.tsv"));
  CHECK(slurp(a / "aggregate.tsv") == slurp(b / "aggregate.tsv"));
  CHECK(fs::exists(a / "timings.tsv"));
  CHECK(fs::exists(a / "curves.tsv"));
  CHECK(fs::exists(a / "failures.tsv"));
  CHECK(fs::exists(a / "images" / "ground_truth.pgm"));

  const auto header = slurp(a / "results.tsv").substr(0, slurp(a / "results.tsv").find('\n'));
  CHECK(header == "mode\tP\trequested_ratio\tachieved_ratio\ttrial\tseed\trho\tsnr_full_db\tsnr_window_db\tbsnr_db\titerations");
  const auto rows = read_results_table(a / "results.tsv");
  REQUIRE(rows.size() == first.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].seed == first.rows[i].seed);
    CHECK(rows[i].snr_full_db == first.rows[i].snr_full_db);
    CHECK(rows[i].rho == first.rows[i].rho);
  }
}

TEST_CASE("ground truth can be loaded from a PGM file") {
  const auto path = fs::temp_directory_path() / "lensless_truth.pgm";
  {
    std::ofstream out(path);
    out << "P2\n4 4\n255\n";
    for (int i = 0; i < 16; ++i) out << i * 10 << ' ';
    out << '\n';
  }
  ExperimentConfig c;
  c.image_path = path.string();
  c.width = c.height = 4;
  const auto t = load_ground_truth(c);
  CHECK(t.grid() == ImageGrid(4, 4));
  CHECK(t[0] == 0.0);
  CHECK(t[15] == 1.0);
  c.width = 8;
  CHECK_THROWS(load_ground_truth(c));
}

TEST_CASE("compose_panel lays observations above estimates") {
  const ImageGrid g(4, 3);
  const auto p = compose_panel({RasterImage(g, 1.0), RasterImage(g, 2.0)}, {RasterImage(g), RasterImage(g)});
  CHECK(p.grid().width() >= 8);
  CHECK(p.grid().height() >= 6);
}
