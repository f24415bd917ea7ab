#pragma once

#include <stdexcept>
#include <string>

namespace trl {

// Error categories the command line tool maps to distinct exit codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runtime failures inside the simulation itself (e.g. an unsatisfiable spawn).
struct EnvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace trl
