#ifndef MCSIM_CLI_HANDLES_HPP
#define MCSIM_CLI_HANDLES_HPP

#include <memory>
#include <stdexcept>
#include <string>

#include "mcsim/mcsim.h"

namespace mcsim_cli {

// Error raised from a failed C API call; keeps the status for exit codes.
class ApiError : public std::runtime_error {
 public:
  ApiError(mcsim_status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  mcsim_status status() const noexcept { return status_; }

 private:
  mcsim_status status_;
};

inline void check(mcsim_status status) {
  if (status != MCSIM_OK)
    throw ApiError(status, std::string(mcsim_status_name(status)) + ": " + mcsim_last_error());
}

struct SceneDeleter {
  void operator()(mcsim_scene* s) const noexcept { mcsim_scene_destroy(s); }
};
struct BatchDeleter {
  void operator()(mcsim_batch* b) const noexcept { mcsim_batch_destroy(b); }
};

using ScenePtr = std::unique_ptr<mcsim_scene, SceneDeleter>;
using BatchPtr = std::unique_ptr<mcsim_batch, BatchDeleter>;

}  // namespace mcsim_cli

#endif
