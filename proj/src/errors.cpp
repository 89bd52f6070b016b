#include "gtransnet/errors.hpp"

#include <iostream>

namespace gtransnet {

void log_warning(const std::string& message) {
  std::cerr << "gtransnet: warning: " << message << '\n';
}

}  // namespace gtransnet
