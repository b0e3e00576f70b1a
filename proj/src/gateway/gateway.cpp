#include "permadid/gateway/gateway.hpp"

#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "permadid/arns/registry.hpp"
#include "permadid/did/did.hpp"
#include "permadid/errors.hpp"

namespace permadid::gateway {

namespace {

using nlohmann::json;

std::string error_body(Errc code, const std::string& message) {
    json j;
    j["code"] = errc_name(code);
    j["error"] = message;
    return j.dump();
}

void reply_error(httplib::Response& res, int status, Errc code, const std::string& message) {
    res.status = status;
    res.set_content(error_body(code, message), "application/json");
}

std::string content_type_of(const std::vector<weave::Tag>& tags) {
    for (const auto& tag : tags) {
        if (tag.name == "Content-Type") return tag.value;
    }
    return "application/octet-stream";
}

void reply_data(httplib::Response& res, const Bytes& data,
                const std::vector<weave::Tag>& tags) {
    res.status = 200;
    res.set_content(std::string(data.begin(), data.end()), content_type_of(tags));
}

}  // namespace

struct Gateway::Impl {
    Impl(weave::WeaveStore& weave, GatewayConfig config)
        : weave(weave), config(std::move(config)), names(weave), dids(weave, names) {}

    weave::WeaveStore& weave;
    GatewayConfig config;
    arns::NameRegistry names;
    did::DidMethod dids;
    httplib::Server server;
    std::thread worker;
    int bound_port = -1;

    void install_routes();
};

void Gateway::Impl::install_routes() {
    // Allow quick restarts but never two live gateways on one port; the
    // second bind must fail instead of silently sharing traffic.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes),
                   sizeof(yes));
    });

    server.Get("/tx/([^/]+)", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        if (!weave.has(id)) {
            reply_error(res, 404, Errc::NotFound, "no transaction " + id);
            return;
        }
        const weave::Transaction tx = weave.get(id);
        reply_data(res, tx.data, tx.tags);
    });

    server.Get("/name/([^/]+)", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string name = req.matches[1];
        try {
            const auto [target, record] = names.resolve(name);
            (void)record;
            json j;
            j["name"] = name;
            j["target"] = target;
            res.set_content(j.dump(), "application/json");
        } catch (const Error& e) {
            reply_error(res, 404, e.code(), e.what());
        }
    });

    server.Get("/did/([^/]+)", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        try {
            const did::DidDocument doc = dids.resolve_did(id);
            res.set_content(did::document_to_json(doc), "application/json");
        } catch (const Error& e) {
            reply_error(res, 404, e.code(), e.what());
        }
    });

    server.Post("/tx", [this](const httplib::Request& req, httplib::Response& res) {
        if (!config.writable) {
            reply_error(res, 403, Errc::PermissionDenied, "gateway is read-only");
            return;
        }
        try {
            const json body = json::parse(req.body);
            const std::string owner = body.at("owner").get<std::string>();
            std::vector<weave::Tag> tags;
            for (const auto& tag : body.value("tags", json::array())) {
                tags.push_back({tag.at("name").get<std::string>(),
                                tag.at("value").get<std::string>()});
            }
            const Bytes data = base64url_decode(body.at("data").get<std::string>());
            const weave::TxId id = weave.submit(owner, tags, data);
            json j;
            j["id"] = id;
            res.set_content(j.dump(), "application/json");
        } catch (const json::exception& e) {
            reply_error(res, 400, Errc::ParseError,
                        std::string("malformed submission: ") + e.what());
        } catch (const Error& e) {
            reply_error(res, 400, e.code(), e.what());
        }
    });

    // Catch-all data route, last so the named routes win.
    server.Get("/([^/]+)", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        if (weave.has(id)) {
            const weave::Transaction tx = weave.get(id);
            reply_data(res, tx.data, tx.tags);
            return;
        }
        if (weave.has_item(id)) {
            const weave::BundleItem item = weave.get_item(id);
            reply_data(res, item.data, item.tags);
            return;
        }
        reply_error(res, 404, Errc::NotFound, "no transaction or item " + id);
    });

    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        reply_error(res, 404, Errc::NotFound, "specify /tx/{id}, /name/{name} or /did/{did}");
    });
}

Gateway::Gateway(weave::WeaveStore& weave, GatewayConfig config)
    : impl_(std::make_unique<Impl>(weave, std::move(config))) {
    impl_->install_routes();
}

Gateway::~Gateway() { stop(); }

int Gateway::start() {
    if (impl_->server.is_running()) return impl_->bound_port;
    if (impl_->config.port == 0) {
        const int port = impl_->server.bind_to_any_port(impl_->config.host);
        if (port < 0) {
            throw Error(Errc::BindFailure, "cannot bind " + impl_->config.host);
        }
        impl_->bound_port = port;
    } else {
        if (!impl_->server.bind_to_port(impl_->config.host, impl_->config.port)) {
            throw Error(Errc::BindFailure, "cannot bind " + impl_->config.host + ":" +
                                               std::to_string(impl_->config.port));
        }
        impl_->bound_port = impl_->config.port;
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->bound_port;
}

void Gateway::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

int Gateway::port() const { return impl_->bound_port; }

bool Gateway::running() const { return impl_->server.is_running(); }

std::string Gateway::base_url() const {
    return "http://" + impl_->config.host + ":" + std::to_string(impl_->bound_port);
}

}  // namespace permadid::gateway
