#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "permadid/protocol/protocol.hpp"

/// Scripted end-to-end runs. A scenario is a JSON array of steps
/// {"action", "actor", "params"}; the runner keeps one EntityProfile per
/// actor and replays the steps in order, producing a transcript the CLI
/// prints and tests assert against.
///
/// Actions:
///   setup    params: {"role", "name"?}
///   issue    params: {"holder", "claims": {path: value...}, "predicates"?,
///                     "schema"?, "today"?}
///   verify   params: {"holder", "paths": [..], "expect"?: "accept"|"reject"}
///   replay   params: {"holder", "expect"?}   repeats the last request
///   refresh  params: {"issuers"?: [actor..]}  defaults to all issuer actors
///   revoke   params: {"holder", "index"?: 0}
///   mine     params: {}
///
/// Any step may set "expect": "error" when the action is supposed to throw.
namespace permadid::protocol {

struct ScenarioEvent {
    size_t step = 0;
    std::string action;
    std::string actor;
    bool ok = true;
    std::string note;  // one human-readable transcript line
    std::string data;  // JSON object with the machine-readable detail
};

struct ScenarioReport {
    std::vector<ScenarioEvent> events;
    bool all_ok = true;
    /// An unexpected protocol-level REJECT occurred (expected ones do not
    /// count). The CLI maps this to its failure exit code.
    bool rejected = false;
};

std::string report_to_json(const ScenarioReport& report);

class ScenarioRunner {
public:
    explicit ScenarioRunner(ProtocolEngine& engine) : engine_(engine) {}

    /// Runs every step; stops at the first step whose outcome does not
    /// match its expectation. Malformed scenario JSON throws ParseError.
    ScenarioReport run(const std::string& scenario_json);

    /// Actor state after a run; null for unknown actors.
    EntityProfile* find_entity(const std::string& actor);

private:
    ProtocolEngine& engine_;
    std::map<std::string, EntityProfile> entities_;
    std::optional<VerificationRequest> last_request_;
};

}  // namespace permadid::protocol
