#pragma once

#include <string>

#include "httplib.h"
#include "skyex/service.hpp"

namespace skyex {

/// Routes /datasets* and /snapshots/* on `server` to `service`. The service
/// must outlive the server.
void mount_api(httplib::Server& server, Service& service);

/// Mounts `static_dir` at / when non-empty. Returns false if the directory
/// does not exist.
bool mount_static(httplib::Server& server, const std::string& static_dir);

}  // namespace skyex
