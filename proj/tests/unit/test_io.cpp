#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lensless/config.hpp"
#include "lensless/image_io.hpp"
#include "lensless/record_io.hpp"
#include "oracles.hpp"

using namespace lensless;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "lensless_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("PGM round trip keeps values to 16-bit precision") {
  RandomStream rng(1);
  RasterImage u(ImageGrid(7, 5));
  for (auto& v : u.values()) v = rng.uniform();
  u[0] = 0.0;
  u[1] = 1.0;
  const auto path = scratch("round.pgm");
  write_pgm(path, u);
  const auto back = read_pgm(path);
  CHECK(back.grid() == u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(back[i] - u[i]) <= 1.0 / 65535.0);
}

TEST_CASE("read_pgm accepts ASCII 8-bit files with comments") {
  const auto path = scratch("ascii.pgm");
  {
    std::ofstream out(path);
    out << "P2\n# comment\n3 2\n255\n0 51 102\n153 204 255\n";
  }
  const auto u = read_pgm(path);
  CHECK(u.grid() == ImageGrid(3, 2));
  CHECK(u[1] == doctest::Approx(0.2));
  CHECK(u[5] == 1.0);
}

TEST_CASE("read_pgm rejects malformed input") {
  const auto path = scratch("bad.pgm");
  {
    std::ofstream out(path);
    out << "P6\n1 1\n255\n";
  }
  CHECK_THROWS(read_pgm(path));
  CHECK_THROWS(read_pgm(scratch("missing.pgm")));
}

TEST_CASE("raw kernel round trip") {
  const ImageGrid g(16, 8);
  const auto k = speckle_psf({g, 0.2}, RandomStream(3));
  const auto path = scratch("kernel.raw");
  write_kernel_raw(path, k);
  CHECK(fs::file_size(path) == 12 + 8 * g.size());
  const auto back = read_kernel_raw(path);
  CHECK(back.kind() == KernelKind::kSpeckle);
  CHECK(back.image().grid() == g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.image()[i] == doctest::Approx(k.image()[i]).epsilon(1e-14));
}

TEST_CASE("acquisition record round trip is exact") {
  RandomStream rng(4);
  const ImageGrid g(12, 10);
  AcquisitionModel m;
  m.grid = g;
  m.kernels = {speckle_psf({g, 0.15}, RandomStream(5)), speckle_psf({g, 0.15}, RandomStream(6))};
  m.partition = make_partition(g.size(), 2, RandomStream(7));
  m.window = centered_window(g, 0.5);
  const auto rec = acquire(oracle::random_image(g, rng), m, 40.0, RandomStream(8));
  const auto path = scratch("record.bin");
  save_record(path, rec, {{"note", "unit"}});
  const auto loaded = load_record(path);
  const auto& r = loaded.record;
  CHECK(loaded.provenance["note"] == "unit");
  CHECK(r.y == rec.y);
  CHECK(r.y_clean == rec.y_clean);
  CHECK(r.noise.sigma == rec.noise.sigma);
  CHECK(r.noise.seed == rec.noise.seed);
  CHECK(r.model.grid == g);
  CHECK(r.model.window.side() == rec.model.window.side());
  CHECK(r.model.window.requested_ratio() == 0.5);
  REQUIRE(r.model.kernels.size() == 2);
  CHECK(r.model.kernels[1].image().data() == rec.model.kernels[1].image().data());
  CHECK(r.model.kernels[1].seed() == rec.model.kernels[1].seed());
  CHECK(std::equal(r.model.partition.labels().begin(), r.model.partition.labels().end(),
                   rec.model.partition.labels().begin()));
  CHECK(r.model.partition.seed() == rec.model.partition.seed());
}

TEST_CASE("noiseless records keep the infinite BSNR") {
  const ImageGrid g(4, 4);
  AcquisitionModel m;
  m.grid = g;
  m.kernels = {Kernel::delta(g)};
  m.partition = make_partition(g.size(), 1, RandomStream(1));
  m.window = centered_window(g, 1.0);
  const auto rec = acquire(RasterImage(g, 1.0), m, kNoiselessBsnr, RandomStream(1));
  const auto path = scratch("noiseless.bin");
  save_record(path, rec);
  CHECK(load_record(path).record.noise.bsnr_target_db == kNoiselessBsnr);
}

TEST_CASE("load_record rejects foreign files") {
  const auto path = scratch("foreign.bin");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTAREC!xxxxxxxxxxxx";
  }
  CHECK_THROWS(load_record(path));
}

TEST_CASE("config parsing applies keys and rejects unknown ones") {
  ExperimentConfig c;
  apply_config(nlohmann::json::parse(R"({
    "width": 64, "height": 64, "ratios": [0.2, 0.5], "modes": ["focused", "speckle:4"],
    "bsnr": "inf", "trials": 3, "seed": 9,
    "solver": {"rho_points": 5, "mu": 0.5, "mu_rho_ref": 0.0, "cg_tol": 1e-5}
  })"), c);
  CHECK(c.width == 64);
  CHECK(c.ratios == std::vector<double>{0.2, 0.5});
  REQUIRE(c.modes.size() == 2);
  CHECK(c.modes[1].patterns == 4);
  CHECK(c.bsnr_db == kNoiselessBsnr);
  CHECK(c.trials == 3);
  CHECK(c.base_seed == 9);
  CHECK(c.solver.rho_points == 5);
  CHECK(c.solver.admm_penalty == 0.5);
  CHECK(c.solver.penalty_rho_ref == 0.0);
  CHECK(c.solver.cg_tol == 1e-5);

  CHECK_THROWS(apply_config(nlohmann::json::parse(R"({"ratio": [0.5]})"), c));
  CHECK_THROWS(apply_config(nlohmann::json::parse(R"({"solver": {"muu": 1}})"), c));
}

TEST_CASE("config survives a to_json round trip") {
  ExperimentConfig c;
  c.trials = 7;
  c.modes = {ModeSpec::parse("speckle:2")};
  c.solver.rho_grid = {1e-3, 1e-2};
  ExperimentConfig d;
  apply_config(to_json(c), d);
  CHECK(d.trials == 7);
  CHECK(d.modes == c.modes);
  CHECK(d.solver.rho_grid == c.solver.rho_grid);
  CHECK(to_json(d) == to_json(c));
}

TEST_CASE("config files may carry comments") {
  const auto path = scratch("commented.json");
  {
    std::ofstream out(path);
    out << "{\n  // small run\n  \"trials\": 2\n}\n";
  }
  CHECK(load_experiment_config(path).trials == 2);
}
