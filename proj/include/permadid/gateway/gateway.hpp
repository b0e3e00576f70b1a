#pragma once

#include <memory>
#include <string>

#include "permadid/weave/store.hpp"

/// Read-only HTTP view over a weave: transaction and data fetches, name
/// resolution and DID resolution. Serving never mutates the store; an
/// explicitly write-enabled gateway additionally accepts submissions, which
/// go through the store's single writer.
namespace permadid::gateway {

struct GatewayConfig {
    std::string host = "127.0.0.1";
    int port = 0;  // 0 picks a free port
    bool writable = false;
};

/// Routes:
///   GET /tx/{txid}    transaction data bytes, Content-Type from its tags
///   GET /name/{name}  {"target": "<txid>"} as the registry resolves it
///   GET /did/{did}    the resolved DID document
///   GET /{id}         data bytes by transaction or bundle item id
///   POST /tx          write-enabled gateways only: {"owner", "tags", "data"}
/// Misses return 404 with a JSON body {"code", "error"}.
class Gateway {
public:
    explicit Gateway(weave::WeaveStore& weave, GatewayConfig config = {});
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    /// Throws BindFailure when the address cannot be claimed.
    int start();
    void stop();

    int port() const;
    bool running() const;
    std::string base_url() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace permadid::gateway
