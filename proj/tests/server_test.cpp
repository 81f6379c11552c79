#include <gtest/gtest.h>

#include <thread>

#include "procfeed/server.hpp"
#include "test_util.hpp"

using namespace procfeed;

namespace {

std::string small_bundle() {
    RevisionHistory h;
    h.snapshots = {{0, "Line one.\nLine two."}, {5000, "Line one.\nLine 2.\nLine three."}};
    return serialize_bundle(build_bundle(h, AnalysisOptions{}));
}

/// Runs a BundleServer on an ephemeral loopback port for one test.
class LiveServer {
public:
    explicit LiveServer(std::string bundle, std::optional<fs::path> assets = std::nullopt)
        : server_(std::move(bundle), std::move(assets)) {
        port_ = server_.bind("127.0.0.1", 0);
        thread_ = std::thread([this] { server_.listen(); });
        server_.http().wait_until_ready();
    }
    ~LiveServer() {
        server_.stop();
        thread_.join();
    }
    int port() const { return port_; }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }
    BundleServer& server() { return server_; }

private:
    BundleServer server_;
    int port_ = 0;
    std::thread thread_;
};

} // namespace

TEST(Serve, BundleEndpoint) {
    const auto text = small_bundle();
    LiveServer live(text);
    auto res = live.client().Get("/bundle");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->body, text);
    EXPECT_EQ(Json::parse(res->body).at("schema"), "pvbundle/1");
}

TEST(Serve, DiffEndpoint) {
    LiveServer live(small_bundle());
    auto cli = live.client();

    auto same = cli.Get("/diff?i=0&j=0");
    ASSERT_TRUE(same);
    EXPECT_EQ(same->status, 200);
    const auto doc = Json::parse(same->body);
    ASSERT_EQ(doc.at("segments").size(), 1u);
    EXPECT_EQ(doc.at("segments")[0].at("label"), "common");
    EXPECT_EQ(doc.at("unit"), "line");

    auto fwd = cli.Get("/diff?i=0&j=1");
    ASSERT_TRUE(fwd);
    const auto f = Json::parse(fwd->body);
    EXPECT_EQ(f.at("lines_added"), 2);
    EXPECT_EQ(f.at("lines_removed"), 1);

    auto oob = cli.Get("/diff?i=0&j=999");
    ASSERT_TRUE(oob);
    EXPECT_EQ(oob->status, 400);
    EXPECT_EQ(Json::parse(oob->body).at("error"), "IndexOutOfRange");

    auto bad = cli.Get("/diff?i=zero&j=1");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
    auto missing = cli.Get("/diff?i=0");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 400);
}

TEST(Serve, StaticAssets) {
    {
        LiveServer live(small_bundle());
        auto res = live.client().Get("/");
        ASSERT_TRUE(res);
        EXPECT_EQ(res->status, 200);
        EXPECT_NE(res->body.find("/bundle"), std::string::npos);
    }
    testutil::TempDir dir;
    testutil::write(dir / "index.html", "<p>viewer</p>");
    LiveServer live(small_bundle(), dir.path());
    auto res = live.client().Get("/index.html");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->body, "<p>viewer</p>");
}

TEST(Serve, PortInUse) {
    LiveServer live(small_bundle());
    BundleServer second(small_bundle());
    try {
        second.bind("127.0.0.1", live.port());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PortInUse);
    }
}

TEST(Serve, RejectsNonBundle) {
    EXPECT_THROW(BundleServer("{}"), Error);
    EXPECT_THROW(BundleServer("not json"), Error);
}
