#include "permadid/protocol/scenario.hpp"

#include <utility>

#include <json.hpp>

#include "permadid/errors.hpp"

namespace permadid::protocol {

namespace {

using nlohmann::json;

vc::Schema schema_from_name(const std::string& name) {
    if (name == "none") return vc::Schema::None;
    if (name == "natural_person") return vc::Schema::EidasNaturalPerson;
    if (name == "legal_person") return vc::Schema::EidasLegalPerson;
    throw Error(Errc::ParseError, "unknown schema: " + name);
}

vc::PredicateOp op_from_name(const std::string& name) {
    if (name == ">=") return vc::PredicateOp::GreaterOrEqual;
    if (name == "<=") return vc::PredicateOp::LessOrEqual;
    if (name == "in") return vc::PredicateOp::InSet;
    throw Error(Errc::ParseError, "unknown predicate op: " + name);
}

std::vector<vc::PredicateSpec> predicates_from_json(const json& list) {
    if (!list.is_array()) throw Error(Errc::ParseError, "predicates must be an array");
    std::vector<vc::PredicateSpec> specs;
    for (const auto& entry : list) {
        if (!entry.is_object()) throw Error(Errc::ParseError, "predicate must be an object");
        vc::PredicateSpec spec;
        spec.source_path = entry.at("source").get<std::string>();
        spec.op = op_from_name(entry.at("op").get<std::string>());
        if (entry.contains("bound")) spec.bound = entry.at("bound").get<int64_t>();
        if (entry.contains("set")) {
            for (const auto& member : entry.at("set")) {
                spec.member_set.push_back(member.get<std::string>());
            }
        }
        if (entry.contains("output")) spec.output_path = entry.at("output").get<std::string>();
        specs.push_back(std::move(spec));
    }
    return specs;
}

json value_to_json(const vc::ClaimValue& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    if (const auto* i = std::get_if<int64_t>(&value)) return *i;
    if (const auto* b = std::get_if<bool>(&value)) return *b;
    return std::get<vc::DateValue>(value).iso;
}

json result_to_json(const VerificationResult& result, const Bytes& nonce) {
    json j;
    j["result"] = result.accepted ? "ACCEPT" : "REJECT";
    if (!result.accepted) {
        j["reason"] = vc::reject_reason_name(result.reason);
        if (!result.detail.empty()) j["detail"] = result.detail;
    }
    json disclosed = json::object();
    for (const auto& [path, value] : result.disclosed) disclosed[path] = value_to_json(value);
    j["disclosed"] = disclosed;
    j["nonce"] = base64url_encode(nonce);
    return j;
}

std::string disclosed_text(const VerificationResult& result) {
    std::string text;
    for (const auto& [path, value] : result.disclosed) {
        if (!text.empty()) text += ", ";
        text += path + "=" + vc::value_text(value);
    }
    return text.empty() ? "(nothing)" : text;
}

}  // namespace

std::string report_to_json(const ScenarioReport& report) {
    json events = json::array();
    for (const auto& event : report.events) {
        json e;
        e["step"] = event.step;
        e["action"] = event.action;
        e["actor"] = event.actor;
        e["ok"] = event.ok;
        e["note"] = event.note;
        e["data"] = event.data.empty() ? json::object() : json::parse(event.data);
        events.push_back(std::move(e));
    }
    json j;
    j["events"] = std::move(events);
    j["all_ok"] = report.all_ok;
    j["rejected"] = report.rejected;
    return j.dump();
}

EntityProfile* ScenarioRunner::find_entity(const std::string& actor) {
    auto it = entities_.find(actor);
    return it == entities_.end() ? nullptr : &it->second;
}

ScenarioReport ScenarioRunner::run(const std::string& scenario_json) {
    json steps;
    try {
        steps = json::parse(scenario_json);
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!steps.is_array()) throw Error(Errc::ParseError, "scenario must be a JSON array of steps");

    ScenarioReport report;
    for (size_t index = 0; index < steps.size(); ++index) {
        const json& step = steps[index];
        if (!step.is_object() || !step.contains("action") || !step.at("action").is_string() ||
            !step.contains("actor") || !step.at("actor").is_string()) {
            throw Error(Errc::ParseError,
                        "step " + std::to_string(index) + " needs string action and actor");
        }

        ScenarioEvent event;
        event.step = index;
        event.action = step.at("action").get<std::string>();
        event.actor = step.at("actor").get<std::string>();
        const json params = step.value("params", json::object());
        const std::string expect = params.value("expect", std::string{});

        auto entity = [&](const std::string& who) -> EntityProfile& {
            auto it = entities_.find(who);
            if (it == entities_.end()) {
                throw Error(Errc::NotFound, "actor never set up: " + who);
            }
            return it->second;
        };

        try {
            if (event.action == "setup") {
                if (entities_.count(event.actor) != 0) {
                    throw Error(Errc::ParseError, "actor already set up: " + event.actor);
                }
                const Role role = role_from_name(params.value("role", std::string{"holder"}));
                std::optional<std::string> name;
                if (params.contains("name")) name = params.at("name").get<std::string>();
                EntityProfile profile = engine_.setup_entity(role, name);
                json data;
                data["did"] = profile.did;
                data["doc_tx"] = profile.published_doc_tx;
                data["role"] = role_name(role);
                if (name) data["name"] = *name;
                event.note = std::string(role_name(role)) + " " + profile.did +
                             (name ? " name=" + *name : "");
                event.data = data.dump();
                entities_.emplace(event.actor, std::move(profile));
            } else if (event.action == "issue") {
                EntityProfile& issuer = entity(event.actor);
                EntityProfile& holder = entity(params.at("holder").get<std::string>());
                json subject = params.value("claims", json::object());
                if (!subject.is_object()) {
                    throw Error(Errc::ParseError, "claims must be an object");
                }
                subject["id"] = holder.did;
                const vc::ClaimSet claims = vc::claim_set_from_json(subject.dump());
                std::vector<vc::PredicateSpec> predicates;
                if (params.contains("predicates")) {
                    predicates = predicates_from_json(params.at("predicates"));
                }
                const vc::Schema schema =
                    schema_from_name(params.value("schema", std::string{"none"}));
                std::optional<vc::DateValue> today;
                if (params.contains("today")) {
                    today = vc::DateValue{params.at("today").get<std::string>()};
                }
                const vc::Credential credential =
                    engine_.run_issuance(issuer, holder, claims, predicates, schema, today);
                json data;
                data["credential_id"] = credential.id;
                data["issuer"] = credential.issuer;
                data["holder"] = holder.did;
                json paths = json::array();
                for (const auto& [path, value] :
                     vc::canonicalize(credential.credential_subject).messages) {
                    (void)value;
                    paths.push_back(path);
                }
                data["paths"] = paths;
                event.note = "credential " + credential.id + " -> " +
                             params.at("holder").get<std::string>();
                event.data = data.dump();
            } else if (event.action == "verify" || event.action == "replay") {
                EntityProfile& verifier = entity(event.actor);
                EntityProfile& holder = entity(params.at("holder").get<std::string>());
                VerificationRequest request;
                if (event.action == "replay") {
                    if (!last_request_) {
                        throw Error(Errc::ParseError, "replay before any verify step");
                    }
                    request = *last_request_;
                } else {
                    std::set<std::string> paths;
                    for (const auto& path : params.value("paths", json::array())) {
                        paths.insert(path.get<std::string>());
                    }
                    request = engine_.make_request(verifier, std::move(paths));
                    last_request_ = request;
                }
                const VerificationResult result =
                    engine_.run_verification(verifier, holder, request);
                event.data = result_to_json(result, request.nonce).dump();
                if (result.accepted) {
                    event.note = "ACCEPT disclosed " + disclosed_text(result);
                    if (expect == "reject") {
                        event.ok = false;
                        event.note += " (expected a reject)";
                    }
                } else {
                    event.note = std::string("REJECT (") + vc::reject_reason_name(result.reason) +
                                 ") " + result.detail;
                    if (expect == "reject") {
                        event.note += " as expected";
                    } else {
                        event.ok = false;
                        report.rejected = true;
                    }
                }
            } else if (event.action == "refresh") {
                EntityProfile& holder = entity(event.actor);
                std::vector<const EntityProfile*> issuers;
                if (params.contains("issuers")) {
                    for (const auto& who : params.at("issuers")) {
                        issuers.push_back(&entity(who.get<std::string>()));
                    }
                } else {
                    for (const auto& [who, profile] : entities_) {
                        (void)who;
                        if (profile.bbs_keypair) issuers.push_back(&profile);
                    }
                }
                const std::string old_did = holder.did;
                EntityProfile fresh = engine_.refresh_identity(std::move(holder), issuers);
                json data;
                data["old_did"] = old_did;
                data["new_did"] = fresh.did;
                data["reissued"] = fresh.wallet.size();
                event.note = "new did " + fresh.did + ", reissued " +
                             std::to_string(fresh.wallet.size()) + " credential(s)";
                event.data = data.dump();
                entities_[event.actor] = std::move(fresh);
            } else if (event.action == "revoke") {
                EntityProfile& issuer = entity(event.actor);
                EntityProfile& holder = entity(params.at("holder").get<std::string>());
                const size_t index_in_wallet = params.value("index", size_t{0});
                if (index_in_wallet >= holder.wallet.size()) {
                    throw Error(Errc::NotFound, "wallet has no credential at that index");
                }
                const std::string credential_id = holder.wallet[index_in_wallet].id;
                const weave::TxId tx =
                    engine_.credentials().revoke(issuer.auth_keypair, issuer.did, credential_id);
                json data;
                data["credential_id"] = credential_id;
                data["revocation_tx"] = tx;
                event.note = "revoked " + credential_id;
                event.data = data.dump();
            } else if (event.action == "mine") {
                engine_.weave().mine_block();
                json data;
                data["height"] = engine_.weave().block_count() - 1;
                event.note = "sealed block " + std::to_string(engine_.weave().block_count() - 1);
                event.data = data.dump();
            } else {
                throw Error(Errc::ParseError, "unknown action: " + event.action);
            }

            if (expect == "error" && event.ok) {
                event.ok = false;
                event.note += " (expected an error)";
            }
        } catch (const Error& e) {
            if (expect == "error") {
                event.note = std::string("failed as expected: ") + e.what();
            } else {
                event.ok = false;
                event.note = e.what();
            }
            json data;
            data["error"] = e.what();
            event.data = data.dump();
        }

        const bool ok = event.ok;
        report.events.push_back(std::move(event));
        if (!ok) {
            report.all_ok = false;
            break;
        }
    }
    return report;
}

}  // namespace permadid::protocol
