#ifndef MCSIM_CLI_CONFIG_HPP
#define MCSIM_CLI_CONFIG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mcsim_cli {

// Validation failure; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Dimension { Length, Time, Diffusion };

/// Parses "<number> <unit>" into SI. Units: m cm mm um nm (length), s ms us min
/// (time), m2/s cm2/s mm2/s um2/s (diffusion). `path` is used in error messages.
double parse_quantity(const nlohmann::json& value, Dimension dim, const std::string& path);

struct ReceiverSpec {
  std::array<double, 3> center{};
  double radius = 0.0;
};

struct SceneConfig {
  double diffusion = 0.0;
  double time_step = 0.0;
  std::int64_t samples = 0;
  std::int64_t molecules = 100000;
  std::array<double, 3> transmitter{};
  std::vector<ReceiverSpec> receivers;
};

// Axes of a one-step channel grid; the grid is their Cartesian product.
struct ChannelGrid {
  std::vector<double> radius;
  std::vector<double> distance;
  std::vector<double> diffusion;
  std::vector<double> time_step;
  std::int64_t molecules = 100000;
};

struct AsymptoteConfig {
  double radius = 0.0;
  double distance = 0.0;
  double tol = 1e-12;
  int n_max = 500;
};

struct ExperimentConfig {
  std::optional<SceneConfig> scene;
  std::optional<ChannelGrid> channel;
  std::optional<AsymptoteConfig> asymptote;
  std::string algorithm = "rmc";
  std::vector<double> xi{0.0};
  std::uint64_t seed = 1;
  std::int64_t realizations = 20;
  int workers = 1;
  std::string output;
};

ExperimentConfig parse_config(const nlohmann::json& root);
ExperimentConfig load_config(const std::string& path);

/// Normalized SI form written into run manifests.
nlohmann::json to_json(const ExperimentConfig& config);

/// Receivers placed symmetrically about the origin at center distance
/// `distance`: 1 on +x, 2 on +/-x, 4 on +/-x and +/-y.
std::vector<ReceiverSpec> symmetric_receivers(int count, double radius, double distance);

}  // namespace mcsim_cli

#endif
