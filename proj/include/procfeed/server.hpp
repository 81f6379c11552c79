#pragma once

#include <memory>
#include <optional>
#include <string>

#include <httplib.h>

#include "analytics.hpp"
#include "bundle_json.hpp"
#include "errors.hpp"
#include "storage.hpp"

namespace procfeed {

inline constexpr const char* kFallbackIndex = R"(<!doctype html>
<html>
<head><meta charset="utf-8"><title>Process feedback</title></head>
<body>
<h1>Process feedback bundle</h1>
<p>No viewer assets were supplied (<code>--assets DIR</code>). The bundle is at
<a href="/bundle">/bundle</a>; diffs are at <code>/diff?i=&amp;j=</code>.</p>
<pre id="stats"></pre>
<script>
fetch('/bundle').then(r => r.json()).then(b => {
  document.getElementById('stats').textContent = JSON.stringify(b.stats, null, 2);
});
</script>
</body>
</html>
)";

/// Read-only HTTP front end for one bundle. Handlers only read the immutable
/// bundle text and embedded history, so requests may run concurrently.
class BundleServer {
public:
    BundleServer(std::string bundle_text, std::optional<fs::path> assets = std::nullopt)
        : bundle_text_(std::move(bundle_text)) {
        Json doc;
        try {
            doc = Json::parse(bundle_text_);
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::MalformedSession, std::string("bundle is not valid JSON: ") + e.what());
        }
        history_ = history_from_bundle(doc);
        // httplib's default sets SO_REUSEPORT, which would let a second
        // server share an occupied port instead of failing.
        server_.set_socket_options([](auto sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        });
        routes(assets);
    }

    httplib::Server& http() { return server_; }

    /// Binds `host:port` (port 0 picks a free one) and returns the port.
    int bind(const std::string& host, int port) {
        if (port == 0) {
            const int p = server_.bind_to_any_port(host);
            if (p < 0) throw Error(ErrorCode::PortInUse, "cannot bind " + host);
            return p;
        }
        if (!server_.bind_to_port(host, port)) {
            throw Error(ErrorCode::PortInUse, host + ":" + std::to_string(port));
        }
        return port;
    }

    /// Serves until stop() is called.
    void listen() { server_.listen_after_bind(); }
    void stop() { server_.stop(); }

private:
    static void json_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
        res.status = status;
        res.set_content(Json{{"error", code}, {"message", message}}.dump(), "application/json");
    }

    static std::optional<std::size_t> index_param(const httplib::Request& req, const char* name) {
        if (!req.has_param(name)) return std::nullopt;
        const auto v = req.get_param_value(name);
        std::size_t out = 0;
        if (!detail::parse_int(v, out)) return std::nullopt;
        return out;
    }

    void routes(const std::optional<fs::path>& assets) {
        server_.Get("/bundle", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(bundle_text_, "application/json");
        });
        server_.Get("/diff", [this](const httplib::Request& req, httplib::Response& res) {
            const auto i = index_param(req, "i");
            const auto j = index_param(req, "j");
            if (!i || !j) {
                json_error(res, 400, "Usage", "expected non-negative integer parameters i and j");
                return;
            }
            try {
                res.set_content(pair_diff_json(any_to_any_diff(history_, *i, *j)).dump(2, ' ', false,
                                                                                     Json::error_handler_t::replace),
                                "application/json");
            } catch (const Error& e) {
                json_error(res, 400, std::string(to_string(e.code())), e.what());
            }
        });
        if (assets) {
            if (!server_.set_mount_point("/", assets->string())) {
                throw Error(ErrorCode::FileNotFound, "viewer assets directory " + assets->string());
            }
        } else {
            server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
                res.set_content(kFallbackIndex, "text/html; charset=utf-8");
            });
        }
    }

    std::string bundle_text_;
    RevisionHistory history_;
    httplib::Server server_;
};

} // namespace procfeed
