#include "lensless/record_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lensless/binary.hpp"

namespace lensless {

namespace {

constexpr char kMagic[8] = {'L', 'L', 'A', 'C', 'Q', 'R', 'E', 'C'};
constexpr std::uint32_t kVersion = 1;

nlohmann::json encode_bsnr(double db) {
  if (std::isinf(db)) return db > 0 ? "inf" : "-inf";
  return db;
}

double decode_bsnr(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kNoiselessBsnr;
    if (s == "-inf") return -kNoiselessBsnr;
    throw std::runtime_error("record: bad bsnr value " + s);
  }
  return j.get<double>();
}

}  // namespace

void save_record(const std::filesystem::path& path, const AcquisitionRecord& record,
                 const nlohmann::json& provenance) {
  const auto& model = record.model;
  model.validate();
  const auto n = model.grid.size();
  const auto m = model.observed_count();
  if (record.y.size() != m || record.y_clean.size() != m) {
    throw std::invalid_argument("save_record: observation length differs from window size");
  }

  nlohmann::json header;
  header["format"] = "lensless-acquisition-record";
  header["version"] = kVersion;
  header["grid"] = {{"width", model.grid.width()}, {"height", model.grid.height()}};
  header["patterns"] = model.pattern_count();
  auto& kernels = header["kernels"] = nlohmann::json::array();
  for (const auto& k : model.kernels) {
    nlohmann::json entry = {{"kind", std::string(to_string(k.kind()))}};
    entry["seed"] = k.seed() ? nlohmann::json(*k.seed()) : nlohmann::json(nullptr);
    kernels.push_back(entry);
  }
  header["partition"] = {{"seed", model.partition.seed()}};
  header["window"] = {{"side", model.window.side()},
                      {"top_left", {model.window.top_left().row, model.window.top_left().col}},
                      {"requested_ratio", model.window.requested_ratio()},
                      {"achieved_ratio", model.window.achieved_ratio()}};
  header["noise"] = {{"sigma", record.noise.sigma},
                     {"bsnr_target_db", encode_bsnr(record.noise.bsnr_target_db)},
                     {"seed", record.noise.seed}};
  header["arrays"] = {
      {{"name", "y"}, {"dtype", "float64le"}, {"count", m}},
      {{"name", "y_clean"}, {"dtype", "float64le"}, {"count", m}},
      {{"name", "kernels"}, {"dtype", "float64le"}, {"count", model.pattern_count() * n}},
      {{"name", "partition_labels"}, {"dtype", "uint32le"}, {"count", n}},
  };
  header["provenance"] = provenance;
  const auto text = header.dump(2);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  binary::put_le<std::uint32_t>(out, kVersion);
  binary::put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double v : record.y) binary::put_f64(out, v);
  for (double v : record.y_clean) binary::put_f64(out, v);
  for (const auto& k : model.kernels) {
    for (double v : k.image().values()) binary::put_f64(out, v);
  }
  for (auto l : model.partition.labels()) binary::put_le<std::uint32_t>(out, l);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

LoadedRecord load_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
    throw std::runtime_error(path.string() + ": not an acquisition record");
  }
  const auto version = binary::get_le<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error(path.string() + ": unsupported record version");
  const auto header_len = binary::get_le<std::uint64_t>(in);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw std::runtime_error(path.string() + ": truncated header");
  const auto header = nlohmann::json::parse(text);

  const ImageGrid grid(header.at("grid").at("width").get<std::size_t>(),
                       header.at("grid").at("height").get<std::size_t>());
  const auto patterns = header.at("patterns").get<std::size_t>();
  const auto& win = header.at("window");

  std::vector<double> y, y_clean, kernel_values;
  std::vector<std::uint32_t> labels;
  for (const auto& array : header.at("arrays")) {
    const auto name = array.at("name").get<std::string>();
    const auto dtype = array.at("dtype").get<std::string>();
    const auto count = array.at("count").get<std::size_t>();
    if (dtype == "float64le") {
      std::vector<double> values(count);
      for (auto& v : values) v = binary::get_f64(in);
      if (name == "y") y = std::move(values);
      else if (name == "y_clean") y_clean = std::move(values);
      else if (name == "kernels") kernel_values = std::move(values);
    } else if (dtype == "uint32le") {
      std::vector<std::uint32_t> values(count);
      for (auto& v : values) v = binary::get_le<std::uint32_t>(in);
      if (name == "partition_labels") labels = std::move(values);
    } else {
      throw std::runtime_error(path.string() + ": unknown dtype " + dtype);
    }
  }
  if (kernel_values.size() != patterns * grid.size() || labels.size() != grid.size()) {
    throw std::runtime_error(path.string() + ": array sizes inconsistent with header");
  }

  LoadedRecord loaded;
  auto& record = loaded.record;
  auto& model = record.model;
  model.grid = grid;
  const auto& kernel_meta = header.at("kernels");
  for (std::size_t p = 0; p < patterns; ++p) {
    std::vector<double> values(kernel_values.begin() + static_cast<std::ptrdiff_t>(p * grid.size()),
                               kernel_values.begin() + static_cast<std::ptrdiff_t>((p + 1) * grid.size()));
    const auto& meta = kernel_meta.at(p);
    const auto kind = meta.at("kind").get<std::string>() == "speckle" ? KernelKind::kSpeckle : KernelKind::kFocused;
    std::optional<std::uint64_t> seed;
    if (!meta.at("seed").is_null()) seed = meta.at("seed").get<std::uint64_t>();
    model.kernels.push_back(Kernel::restore(RasterImage(grid, std::move(values)), kind, seed));
  }
  model.partition = IndexPartition(patterns, std::move(labels), header.at("partition").at("seed").get<std::uint64_t>());
  model.window = CenteredWindow(grid, win.at("side").get<std::size_t>(), win.at("requested_ratio").get<double>());
  model.validate();

  const auto& noise = header.at("noise");
  record.noise.sigma = noise.at("sigma").get<double>();
  record.noise.bsnr_target_db = decode_bsnr(noise.at("bsnr_target_db"));
  record.noise.seed = noise.at("seed").get<std::uint64_t>();
  record.y = std::move(y);
  record.y_clean = std::move(y_clean);
  if (record.y.size() != model.observed_count() || record.y_clean.size() != model.observed_count()) {
    throw std::runtime_error(path.string() + ": observation length differs from window size");
  }
  loaded.provenance = header.value("provenance", nlohmann::json::object());
  return loaded;
}

}  // namespace lensless
