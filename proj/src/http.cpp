#include "skyex/http.hpp"

namespace skyex {

void mount_api(httplib::Server& server, Service& service) {
    auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
        const Request r{req.method, req.path, {req.params.begin(), req.params.end()}, req.body};
        const auto out = service.handle(r);
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    for (const char* pattern : {R"(/datasets.*)", R"(/snapshots/.*)"}) {
        server.Get(pattern, forward);
        server.Post(pattern, forward);
    }
}

bool mount_static(httplib::Server& server, const std::string& static_dir) {
    return static_dir.empty() || server.set_mount_point("/", static_dir);
}

}  // namespace skyex
