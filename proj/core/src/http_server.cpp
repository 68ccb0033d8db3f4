#include <cctype>

#include <httplib.h>

#include "mplab/service.hpp"

namespace mplab {

void serve_http(Service& service, const std::string& host, int port) {
    httplib::Server server;
    auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
        Request r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) r.query[k] = v;
        for (const auto& [k, v] : req.headers) {
            std::string key = k;
            for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            r.headers[key] = v;
        }
        r.body = req.body;
        const auto out = service.handle(r);
        res.status = out.status;
        res.set_content(out.body, out.content_type.c_str());
    };
    server.Get(".*", dispatch);
    server.Post(".*", dispatch);
    if (!server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace mplab
