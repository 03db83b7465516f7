#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twave/increment.hpp"
#include "twave/jump_law.hpp"
#include "twave/particles.hpp"
#include "twave/waves.hpp"

namespace twave::cli {

using nlohmann::json;

enum class ExitCode : int { Ok = 0, Failure = 1, Validation = 2, Numerical = 3 };

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
};

GridSpec parse_grid(const std::string& text);

struct SimulationSettings {
  std::size_t n = 10'000;
  double horizon = 200.0;
  double burn_in = 50.0;
  double median_interval = 1.0;
  int snapshots = 20;
  std::uint64_t max_events = 20'000'000'000ULL;
  std::string initial_profile;  // CSV path, empty for step data
};

/// Fully resolved run configuration. Models: "power2", "bs" (copying plus
/// compound Poisson jumps, lambda >= 0) and "fkpp" (copying plus Brownian
/// motion, sigma2 >= 0; sigma2 = 0 is pure copying).
struct RunConfig {
  std::string model = "power2";
  std::optional<JumpLaw> jumps;
  double sigma2 = 0.0;
  double lambda = 0.0;
  std::optional<double> c;
  std::optional<double> gamma;
  int k = 2;
  double rho = 1.0;
  std::string mode;  // brownian dispersion mode: minimal | from_gamma | from_speed
  std::uint64_t seed = 1;
  int workers = 1;
  std::size_t pool_size = 100'000;
  int iterations = 50;
  std::size_t samples = 1'000'000;
  std::optional<GridSpec> grid;
  SimulationSettings simulation;

  /// Cross-field checks; throws ValidationError naming the field.
  void validate() const;
  json to_json() const;
};

/// Applies the keys present in j on top of cfg. Unknown keys are errors.
void apply_json(RunConfig& cfg, const json& j);

/// Reads a JSON config (or a run manifest, whose "config" member is used).
RunConfig load_config(const std::filesystem::path& path);

/// Named presets: fkpp-brownian, bs-exp, power2-exp, power2-det.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Entry point; returns the process exit code.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

// Output helpers shared by the commands.

/// Shortest round-trip decimal form.
std::string format_double(double v);

std::string sha256_file(const std::filesystem::path& path);

class OutputDir {
 public:
  OutputDir(std::filesystem::path dir, std::string command, json config, std::uint64_t seed);

  const std::filesystem::path& path() const noexcept { return dir_; }
  std::filesystem::path file(const std::string& name) const { return dir_ / name; }

  void write_json(const std::string& name, const json& j);
  /// CSV with the given header and one row per entry of the columns.
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<const std::vector<double>*>& columns);
  void register_file(const std::string& name);
  /// Writes manifest.json with digests of every registered file.
  void finish();

 private:
  std::filesystem::path dir_;
  std::string command_;
  json config_;
  std::uint64_t seed_;
  std::string started_;
  std::vector<std::string> files_;
};

std::vector<std::vector<double>> read_csv_columns(const std::filesystem::path& path,
                                                  const std::vector<std::string>& wanted);

}  // namespace twave::cli
