#ifndef BOHMQ_COMMANDS_HPP
#define BOHMQ_COMMANDS_HPP

#include <cstddef>
#include <string>

namespace bohmq {

struct CommandOptions {
  std::size_t threads = 1;
  bool verbose = false;
  bool slice_log = false;
  std::string output_dir;  // overrides the config when nonempty
};

// Exit codes: 0 success/converged, 2 configuration error,
// 3 ran but did not converge, 4 numerical failure.
int cmd_validate(const std::string& config_path, const CommandOptions& opts);
int cmd_qpot(const std::string& config_path, const CommandOptions& opts);
int cmd_scf(const std::string& config_path, const CommandOptions& opts);
int cmd_trajectories(const std::string& config_path, const std::string& starts_path,
                     const CommandOptions& opts);

}  // namespace bohmq

#endif
