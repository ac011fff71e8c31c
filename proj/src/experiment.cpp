#include "lensless/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lensless/image_io.hpp"
#include "lensless/metrics.hpp"
#include "lensless/optics.hpp"
#include "lensless/phantom.hpp"

namespace lensless {

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad number in table: " + s);
  return v;
}

std::string ratio_key(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", ratio);
  return buf;
}

std::ofstream open_table(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) out.push_back(field);
  return out;
}

int mode_rank(const std::string& name) { return name == "focused" ? 0 : 1; }

auto row_key(const ResultRow& r) {
  return std::make_tuple(mode_rank(r.mode), r.patterns, r.requested_ratio, r.trial);
}

constexpr const char* kResultHeader =
    "mode\tP\trequested_ratio\tachieved_ratio\ttrial\tseed\trho\tsnr_full_db\tsnr_window_db\tbsnr_db\titerations";

}  // namespace

std::string ModeSpec::name() const { return illumination == Illumination::kFocused ? "focused" : "speckle"; }

std::string ModeSpec::label() const {
  return illumination == Illumination::kFocused ? "focused" : "speckle:" + std::to_string(patterns);
}

ModeSpec ModeSpec::parse(const std::string& text) {
  if (text == "focused") return {Illumination::kFocused, 1};
  const std::string prefix = "speckle:";
  if (text.rfind(prefix, 0) == 0) {
    const auto p = std::stoul(text.substr(prefix.size()));
    if (p == 0) throw std::invalid_argument("mode: speckle pattern count must be >= 1");
    return {Illumination::kSpeckle, p};
  }
  throw std::invalid_argument("unknown mode '" + text + "' (expected focused or speckle:P)");
}

bool operator<(const ModeSpec& a, const ModeSpec& b) {
  return std::make_tuple(static_cast<int>(a.illumination), a.patterns) <
         std::make_tuple(static_cast<int>(b.illumination), b.patterns);
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (width == 0 || height == 0) throw std::invalid_argument("config: grid must be non-empty");
  if (ratios.empty()) throw std::invalid_argument("config: no ratios");
  for (double r : ratios) {
    if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("config: ratios must lie in (0, 1]");
  }
  if (modes.empty()) throw std::invalid_argument("config: no modes");
  for (const auto& m : modes) {
    if (m.patterns < 1) throw std::invalid_argument("config: modes need P >= 1");
    if (m.illumination == Illumination::kFocused && m.patterns != 1) {
      throw std::invalid_argument("config: focused mode uses P = 1");
    }
    if (m.patterns > width * height) throw std::invalid_argument("config: P exceeds pixel count");
  }
  if (std::isnan(bsnr_db)) throw std::invalid_argument("config: bsnr is NaN");
  PupilModel{grid(), pupil_radius}.validate();
  solver.validate();
}

std::uint64_t trial_seed(std::uint64_t base, const ModeSpec& mode, double ratio, int trial) {
  const auto key = mode.label() + "|" + ratio_key(ratio) + "|" + std::to_string(trial);
  return base ^ splitmix64(fnv1a64(key));
}

RasterImage load_ground_truth(const ExperimentConfig& config) {
  if (config.image_path.empty()) return make_phantom(config.grid(), RandomStream(config.phantom_seed));
  auto img = read_pgm(config.image_path);
  if (!(img.grid() == config.grid())) {
    throw std::invalid_argument("ground truth image is " + std::to_string(img.grid().width()) + "x" +
                                std::to_string(img.grid().height()) + ", config expects " +
                                std::to_string(config.width) + "x" + std::to_string(config.height));
  }
  return rescale_unit(img);
}

AcquisitionModel build_model(const ExperimentConfig& config, const ModeSpec& mode, double ratio,
                             std::uint64_t seed) {
  const auto grid = config.grid();
  const PupilModel pupil{grid, config.pupil_radius};
  const RandomStream trial_stream(seed);

  AcquisitionModel model;
  model.grid = grid;
  if (mode.illumination == Illumination::kFocused) {
    model.kernels.push_back(focused_psf(pupil));
    model.partition = make_partition(grid.size(), 1, trial_stream.derive(100));
  } else {
    // Fixed speckles depend only on (base seed, P, index); redrawn ones on the trial.
    const RandomStream speckle_root =
        config.redraw_speckles ? trial_stream : RandomStream(config.base_seed ^ splitmix64(mode.patterns));
    for (std::size_t p = 0; p < mode.patterns; ++p) {
      model.kernels.push_back(speckle_psf(pupil, speckle_root.derive(1 + p)));
    }
    model.partition = make_partition(grid.size(), mode.patterns, trial_stream.derive(100));
  }
  model.window = centered_window(grid, ratio);
  return model;
}

CellOutcome run_cell(const RasterImage& truth, const ExperimentConfig& config, const ModeSpec& mode,
                     double ratio, int trial) {
  const auto start = std::chrono::steady_clock::now();
  const auto seed = trial_seed(config.base_seed, mode, ratio, trial);

  CellOutcome out;
  out.row.mode = mode.name();
  out.row.patterns = mode.patterns;
  out.row.requested_ratio = ratio;
  out.row.trial = trial;
  out.row.seed = seed;

  const auto model = build_model(config, mode, ratio, seed);
  out.row.achieved_ratio = model.window.achieved_ratio();
  out.record = acquire(truth, model, config.bsnr_db, RandomStream(seed).derive(200));
  const auto selection = select_rho(out.record, config.solver);
  out.estimate = selection.estimate;

  const auto report = evaluate(out.estimate, truth, out.record);
  out.row.rho = selection.rho;
  out.row.snr_full_db = report.full_fov_db;
  out.row.snr_window_db = report.window_db;
  out.row.bsnr_db = report.realized_bsnr_db;
  out.row.iterations = selection.iterations;
  out.row.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) { return row_key(a) < row_key(b); });
}

SweepResult run_sweep(const ExperimentConfig& config, const RowCallback& on_row) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto truth = load_ground_truth(config);

  struct Cell {
    ModeSpec mode;
    double ratio;
    int trial;
  };
  std::vector<Cell> cells;
  for (const auto& mode : config.modes) {
    for (double ratio : config.ratios) {
      for (int t = 0; t < config.trials; ++t) cells.push_back({mode, ratio, t});
    }
  }

  std::vector<std::optional<ResultRow>> rows(cells.size());
  std::vector<std::optional<CellFailure>> failures(cells.size());
  std::vector<std::optional<CellSnapshot>> snapshots(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto& cell = cells[i];
      try {
        auto outcome = run_cell(truth, config, cell.mode, cell.ratio, cell.trial);
        if (config.write_images && cell.trial == 0) {
          snapshots[i] = CellSnapshot{cell.mode, cell.ratio, observation_image(outcome.record), outcome.estimate};
        }
        rows[i] = std::move(outcome.row);
        if (on_row) {
          std::lock_guard lock(callback_mutex);
          on_row(*rows[i]);
        }
      } catch (const std::exception& e) {
        failures[i] = CellFailure{cell.mode.name(), cell.mode.patterns, cell.ratio, cell.trial,
                                  trial_seed(config.base_seed, cell.mode, cell.ratio, cell.trial), e.what()};
      }
    }
  };

  unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SweepResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (rows[i]) result.rows.push_back(std::move(*rows[i]));
    if (failures[i]) result.failures.push_back(std::move(*failures[i]));
    if (snapshots[i]) result.snapshots.push_back(std::move(*snapshots[i]));
  }
  sort_rows(result.rows);
  result.aggregates = aggregate(result.rows);
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<int, std::size_t, double>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) groups[{mode_rank(r.mode), r.patterns, r.requested_ratio}].push_back(&r);

  std::vector<AggregateRow> out;
  for (const auto& [key, members] : groups) {
    AggregateRow a;
    a.mode = members.front()->mode;
    a.patterns = members.front()->patterns;
    a.requested_ratio = members.front()->requested_ratio;
    a.achieved_ratio = members.front()->achieved_ratio;
    a.count = members.size();
    const double n = static_cast<double>(a.count);
    for (const auto* r : members) {
      a.mean_snr_db += r->snr_full_db / n;
      a.mean_window_snr_db += r->snr_window_db / n;
      a.mean_bsnr_db += r->bsnr_db / n;
    }
    if (a.count > 1) {
      double ss = 0.0;
      for (const auto* r : members) ss += (r->snr_full_db - a.mean_snr_db) * (r->snr_full_db - a.mean_snr_db);
      a.std_snr_db = std::sqrt(ss / (n - 1.0));
    }
    out.push_back(a);
  }
  return out;
}

void write_results_table(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  auto out = open_table(path);
  out << kResultHeader << '\n';
  for (const auto& r : rows) {
    out << r.mode << '\t' << r.patterns << '\t' << format_double(r.requested_ratio) << '\t'
        << format_double(r.achieved_ratio) << '\t' << r.trial << '\t' << r.seed << '\t' << format_double(r.rho)
        << '\t' << format_double(r.snr_full_db) << '\t' << format_double(r.snr_window_db) << '\t'
        << format_double(r.bsnr_db) << '\t' << r.iterations << '\n';
  }
}

void write_timings_table(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  auto out = open_table(path);
  out << "mode\tP\trequested_ratio\ttrial\twall_time_s\n";
  for (const auto& r : rows) {
    out << r.mode << '\t' << r.patterns << '\t' << format_double(r.requested_ratio) << '\t' << r.trial << '\t'
        << format_double(r.wall_time_s) << '\n';
  }
}

std::vector<ResultRow> read_results_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kResultHeader) {
    throw std::runtime_error(path.string() + ": unexpected results header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 11) throw std::runtime_error(path.string() + ": malformed row: " + line);
    ResultRow r;
    r.mode = f[0];
    r.patterns = std::stoul(f[1]);
    r.requested_ratio = parse_double(f[2]);
    r.achieved_ratio = parse_double(f[3]);
    r.trial = std::stoi(f[4]);
    r.seed = std::stoull(f[5]);
    r.rho = parse_double(f[6]);
    r.snr_full_db = parse_double(f[7]);
    r.snr_window_db = parse_double(f[8]);
    r.bsnr_db = parse_double(f[9]);
    r.iterations = std::stoi(f[10]);
    rows.push_back(r);
  }
  return rows;
}

void write_failures_table(const std::filesystem::path& path, const std::vector<CellFailure>& failures) {
  auto out = open_table(path);
  out << "mode\tP\trequested_ratio\ttrial\tseed\tmessage\n";
  for (const auto& f : failures) {
    auto msg = f.message;
    std::replace(msg.begin(), msg.end(), '\t', ' ');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << f.mode << '\t' << f.patterns << '\t' << format_double(f.requested_ratio) << '\t' << f.trial << '\t'
        << f.seed << '\t' << msg << '\n';
  }
}

void write_aggregate_table(const std::filesystem::path& path, const std::vector<AggregateRow>& rows) {
  auto out = open_table(path);
  out << "mode\tP\trequested_ratio\tachieved_ratio\ttrials\tmean_snr_db\tstd_snr_db\tmean_window_snr_db\tmean_bsnr_db\n";
  for (const auto& a : rows) {
    out << a.mode << '\t' << a.patterns << '\t' << format_double(a.requested_ratio) << '\t'
        << format_double(a.achieved_ratio) << '\t' << a.count << '\t' << format_double(a.mean_snr_db) << '\t'
        << format_double(a.std_snr_db) << '\t' << format_double(a.mean_window_snr_db) << '\t'
        << format_double(a.mean_bsnr_db) << '\n';
  }
}

void write_curves_table(const std::filesystem::path& path, const std::vector<AggregateRow>& rows) {
  std::vector<std::pair<std::string, std::size_t>> modes;
  std::map<double, double> achieved;
  std::map<std::pair<std::string, double>, const AggregateRow*> lookup;
  for (const auto& a : rows) {
    const auto label = a.mode == "focused" ? std::string("focused") : "speckle_P" + std::to_string(a.patterns);
    if (std::find_if(modes.begin(), modes.end(), [&](const auto& m) { return m.first == label; }) == modes.end()) {
      modes.emplace_back(label, a.patterns);
    }
    achieved[a.requested_ratio] = a.achieved_ratio;
    lookup[{label, a.requested_ratio}] = &a;
  }
  auto out = open_table(path);
  out << "requested_ratio\tachieved_ratio";
  for (const auto& [label, p] : modes) out << '\t' << label << "_mean_snr_db\t" << label << "_std_snr_db";
  out << '\n';
  for (const auto& [ratio, ach] : achieved) {
    out << format_double(ratio) << '\t' << format_double(ach);
    for (const auto& [label, p] : modes) {
      const auto it = lookup.find({label, ratio});
      if (it == lookup.end()) {
        out << "\tnan\tnan";
      } else {
        out << '\t' << format_double(it->second->mean_snr_db) << '\t' << format_double(it->second->std_snr_db);
      }
    }
    out << '\n';
  }
}

RasterImage observation_image(const AcquisitionRecord& record) {
  return embed(record.y, record.model.window);
}

RasterImage compose_panel(const std::vector<RasterImage>& top, const std::vector<RasterImage>& bottom) {
  if (top.empty() || top.size() != bottom.size()) throw std::invalid_argument("compose_panel: column mismatch");
  const auto& g = top.front().grid();
  constexpr std::size_t gap = 2;
  const std::size_t cols = top.size();
  const ImageGrid panel_grid(cols * g.width() + (cols - 1) * gap, 2 * g.height() + gap);
  RasterImage panel(panel_grid, 1.0);
  auto blit = [&](const RasterImage& tile, std::size_t row0, std::size_t col0) {
    if (!(tile.grid() == g)) throw std::invalid_argument("compose_panel: tiles must share a grid");
    const auto unit = rescale_unit(tile);
    for (std::size_t r = 0; r < g.height(); ++r) {
      for (std::size_t c = 0; c < g.width(); ++c) panel.at(row0 + r, col0 + c) = unit.at(r, c);
    }
  };
  for (std::size_t i = 0; i < cols; ++i) {
    blit(top[i], 0, i * (g.width() + gap));
    blit(bottom[i], g.height() + gap, i * (g.width() + gap));
  }
  return panel;
}

void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result) {
  const std::filesystem::path dir = config.output_dir;
  std::filesystem::create_directories(dir);
  write_results_table(dir / "results.tsv", result.rows);
  write_timings_table(dir / "timings.tsv", result.rows);
  write_failures_table(dir / "failures.tsv", result.failures);
  write_aggregate_table(dir / "aggregate.tsv", result.aggregates);
  write_curves_table(dir / "curves.tsv", result.aggregates);

  if (result.snapshots.empty()) return;
  const auto images = dir / "images";
  write_pgm(images / "ground_truth.pgm", load_ground_truth(config));
  std::map<double, std::vector<const CellSnapshot*>> by_ratio;
  for (const auto& s : result.snapshots) by_ratio[s.requested_ratio].push_back(&s);
  for (auto& [ratio, snaps] : by_ratio) {
    std::sort(snaps.begin(), snaps.end(), [](const auto* a, const auto* b) { return a->mode < b->mode; });
    std::vector<RasterImage> top, bottom;
    for (const auto* s : snaps) {
      auto tag = s->mode.label();
      std::replace(tag.begin(), tag.end(), ':', '_');
      const auto stem = tag + "_r" + ratio_key(ratio);
      write_pgm(images / (stem + "_y.pgm"), s->observation);
      write_pgm(images / (stem + "_estimate.pgm"), s->estimate);
      top.push_back(s->observation);
      bottom.push_back(s->estimate);
    }
    write_pgm(images / ("panel_r" + ratio_key(ratio) + ".pgm"), compose_panel(top, bottom));
  }
}

}  // namespace lensless
