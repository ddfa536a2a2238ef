#pragma once

#include "camikit/error.hpp"
#include "camikit/imaging/imaging.hpp"
#include "camikit/kernel/kernel.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace camikit::service {

inline constexpr int kDefaultPort = 8417;

/// CAMIKIT_PORT when set to a valid port, else kDefaultPort.
int default_port();

/// round_half_away(clamp((x - (level - window/2)) / window, 0, 1) * 255).
/// A non-positive window maps to a step at `level`.
std::uint8_t window_level(double x, double window, double level) noexcept;

/// Grayscale bytes of a slice. Window and level default to the full value
/// range of `volume`.
std::vector<std::uint8_t> slice_pixels(const ImageVolume& volume, const imaging::Slice2D& slice,
                                       std::optional<double> window, std::optional<double> level);

/// 8-bit grayscale PNG.
std::string encode_png(std::size_t width, std::size_t height,
                       const std::vector<std::uint8_t>& pixels);

/// Maps an error code to the HTTP status used by the API.
int http_status(ErrorCode code) noexcept;

nlohmann::json component_json(const ComponentInfo& info);
nlohmann::json descriptor_json(const ActionDescriptor& d);
nlohmann::json mesh_json(const SurfaceMesh& m);
nlohmann::json api_schema();

/// HTTP front end over a kernel. Mutations go through the kernel's
/// serialized paths; reads take snapshots.
class Service {
public:
  explicit Service(Kernel& kernel, std::filesystem::path static_dir = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds to `host`; port 0 picks a free port. Returns the bound port.
  /// Throws IoFailure when the port cannot be bound.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop().
  void run();
  /// run() on a background thread.
  void start();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace camikit::service
