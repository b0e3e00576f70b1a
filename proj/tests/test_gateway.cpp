#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "oracles.hpp"
#include "permadid/errors.hpp"
#include "permadid/gateway/gateway.hpp"
#include "permadid/protocol/protocol.hpp"

using namespace permadid;
using namespace permadid::gateway;
using nlohmann::json;

namespace {

Bytes seed_of(std::string_view label) {
    crypto::Digest d = crypto::sha256(label);
    return Bytes(d.begin(), d.end());
}

Bytes bytes_of(std::string_view text) { return Bytes(text.begin(), text.end()); }

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& stem)
        : path((std::filesystem::temp_directory_path() / stem).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Weave with one plain transaction, one bundle, and a full identity world
/// (issuer "gov", holder "alice") so every route has something to serve.
struct World {
    World() : rng(seed_of("gateway-world")) {
        owner = crypto::Ed25519KeyPair::from_seed(seed_of("gateway-owner")).address();
        hello_tx = weave.submit(owner,
                                {{"Content-Type", "text/plain"}, {"App", "demo"}},
                                bytes_of("hello weave"));
        auto [bundle_tx_id, item_ids] = weave.bundle_submit(
            owner,
            {{{{"Content-Type", "text/html"}}, bytes_of("<h1>item</h1>")},
             {{{"Content-Type", "application/json"}}, bytes_of("{\"k\":1}")}});
        bundle_tx = bundle_tx_id;
        html_item = item_ids[0];
        weave.mine_block();

        arns::NameRegistry names{weave};
        did::DidMethod dids{weave, names};
        vc::CredentialService credentials{weave, dids};
        protocol::ProtocolEngine engine{weave, names, dids, credentials, rng};
        gov = engine.setup_entity(protocol::Role::Issuer, std::string("gov"));
        alice = engine.setup_entity(protocol::Role::Holder, std::string("alice"));
    }

    weave::WeaveStore weave;
    crypto::SeededRng rng;
    std::string owner;
    weave::TxId hello_tx, bundle_tx;
    weave::ItemId html_item;
    protocol::EntityProfile gov, alice;
};

struct RunningGateway {
    explicit RunningGateway(weave::WeaveStore& weave, GatewayConfig config = {})
        : gateway(weave, config) {
        port = gateway.start();
    }
    Gateway gateway;
    int port = -1;
    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

}  // namespace

TEST_CASE("transaction routes serve exact bytes with tagged content type") {
    World w;
    RunningGateway g(w.weave);
    auto client = g.client();

    auto res = client.Get("/tx/" + w.hello_tx);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == "hello weave");
    CHECK(res->get_header_value("Content-Type") == "text/plain");

    // The catch-all data route serves the same bytes.
    auto direct = client.Get("/" + w.hello_tx);
    REQUIRE(direct);
    CHECK(direct->status == 200);
    CHECK(direct->body == "hello weave");

    // Bundle items resolve by item id with their own content type.
    auto item = client.Get("/" + w.html_item);
    REQUIRE(item);
    CHECK(item->status == 200);
    CHECK(item->body == "<h1>item</h1>");
    CHECK(item->get_header_value("Content-Type") == "text/html");

    // A transaction without a Content-Type tag falls back to octet-stream.
    const weave::TxId raw =
        w.weave.submit(w.owner, {}, bytes_of("raw"));
    w.weave.mine_block();
    auto untyped = client.Get("/tx/" + raw);
    REQUIRE(untyped);
    CHECK(untyped->get_header_value("Content-Type") == "application/octet-stream");
}

TEST_CASE("misses return machine-readable 404 bodies") {
    World w;
    RunningGateway g(w.weave);
    auto client = g.client();

    const std::string ghost(43, '7');
    const std::vector<std::string> paths = {"/tx/" + ghost, "/" + ghost, "/name/ghost",
                                            "/did/did:arweave:" + ghost, "/"};
    for (const std::string& path : paths) {
        auto res = client.Get(path);
        REQUIRE(res);
        CHECK(res->status == 404);
        CHECK(res->get_header_value("Content-Type") == "application/json");
        const json body = json::parse(res->body);
        CHECK(body.contains("code"));
        CHECK(body.contains("error"));
    }

    auto unknown_name = client.Get("/name/ghost");
    CHECK(json::parse(unknown_name->body).at("code") == "UnknownName");
    auto unknown_tx = client.Get("/tx/" + ghost);
    CHECK(json::parse(unknown_tx->body).at("code") == "NotFound");
}

TEST_CASE("name route answers exactly what the registry resolves") {
    World w;
    RunningGateway g(w.weave);
    auto client = g.client();

    auto res = client.Get("/name/alice");
    REQUIRE(res);
    CHECK(res->status == 200);
    const json body = json::parse(res->body);
    CHECK(body.at("name") == "alice");

    arns::NameRegistry names{w.weave};
    CHECK(body.at("target").get<std::string>() == names.resolve("alice").first);
    CHECK(body.at("target").get<std::string>() == w.alice.published_doc_tx);
}

TEST_CASE("did route serves the resolved document") {
    World w;
    RunningGateway g(w.weave);
    auto client = g.client();

    auto res = client.Get("/did/" + w.gov.did);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "application/json");

    arns::NameRegistry names{w.weave};
    did::DidMethod dids{w.weave, names};
    CHECK(res->body == did::document_to_json(dids.resolve_did(w.gov.did)));
    CHECK(json::parse(res->body).at("id") == w.gov.did);

    auto garbage = client.Get("/did/not-a-did");
    REQUIRE(garbage);
    CHECK(garbage->status == 404);
    CHECK(json::parse(garbage->body).contains("code"));
}

TEST_CASE("serving is read-only: the snapshot hash never changes") {
    World w;
    TempFile before("permadid_gateway_before.bin");
    TempFile after("permadid_gateway_after.bin");
    w.weave.save(before.path);

    {
        RunningGateway g(w.weave);
        auto client = g.client();
        client.Get("/tx/" + w.hello_tx);
        client.Get("/name/alice");
        client.Get("/name/ghost");
        client.Get("/did/" + w.gov.did);
        client.Get("/" + std::string(43, 'x'));
        auto post = client.Post("/tx", "{\"owner\":\"o\",\"data\":\"aGk\"}", "application/json");
        REQUIRE(post);
        CHECK(post->status == 403);
        CHECK(json::parse(post->body).at("code") == "PermissionDenied");
    }

    w.weave.save(after.path);
    CHECK(read_file(before.path) == read_file(after.path));
    CHECK(w.weave.pending_count() == 0);
}

TEST_CASE("write-enabled gateways accept submissions through the store") {
    World w;
    GatewayConfig config;
    config.writable = true;
    RunningGateway g(w.weave, config);
    auto client = g.client();

    json body;
    body["owner"] = w.owner;
    body["tags"] = json::array({{{"name", "Content-Type"}, {"value", "text/plain"}}});
    body["data"] = base64url_encode(bytes_of("posted data"));
    auto res = client.Post("/tx", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const std::string id = json::parse(res->body).at("id");
    CHECK(w.weave.has(id));
    CHECK(w.weave.pending_count() == 1);

    // Pending submissions are already fetchable; mining seals them.
    auto fetched = client.Get("/tx/" + id);
    REQUIRE(fetched);
    CHECK(fetched->body == "posted data");
    w.weave.mine_block();
    CHECK(w.weave.pending_count() == 0);

    auto bad = client.Post("/tx", "{\"owner\": 7}", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body).at("code") == "ParseError");
}

TEST_CASE("binding a taken port fails loudly") {
    World w;
    RunningGateway first(w.weave);
    GatewayConfig config;
    config.port = first.port;
    Gateway second(w.weave, config);
    CHECK_THROWS_AS(second.start(), Error);
    try {
        second.start();
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BindFailure);
    }
}

TEST_CASE("lifecycle: ports, stop, and repeated stop") {
    World w;
    RunningGateway g(w.weave);
    CHECK(g.gateway.running());
    CHECK(g.gateway.port() == g.port);
    CHECK(g.gateway.base_url() == "http://127.0.0.1:" + std::to_string(g.port));
    CHECK(g.gateway.start() == g.port);  // idempotent while running
    g.gateway.stop();
    CHECK_FALSE(g.gateway.running());
    g.gateway.stop();  // safe twice
}

TEST_CASE("concurrent readers all succeed") {
    World w;
    RunningGateway g(w.weave);
    std::vector<std::thread> readers;
    std::vector<int> failures(8, 0);
    for (int t = 0; t < 8; ++t) {
        readers.emplace_back([&, t] {
            httplib::Client client("127.0.0.1", g.port);
            for (int i = 0; i < 5; ++i) {
                auto res = client.Get("/tx/" + w.hello_tx);
                if (!res || res->status != 200 || res->body != "hello weave") failures[t]++;
                auto name = client.Get("/name/alice");
                if (!name || name->status != 200) failures[t]++;
            }
        });
    }
    for (auto& thread : readers) thread.join();
    for (int t = 0; t < 8; ++t) CHECK(failures[t] == 0);
}
