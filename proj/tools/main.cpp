#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "permadid/errors.hpp"
#include "permadid/gateway/gateway.hpp"
#include "permadid/protocol/keystore.hpp"
#include "permadid/protocol/protocol.hpp"
#include "permadid/protocol/scenario.hpp"

using namespace permadid;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop = true; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::NotFound, "cannot read " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Internal, "cannot write " + path);
    out << content;
}

weave::WeaveStore load_weave(const std::string& path, bool must_exist) {
    if (std::filesystem::exists(path)) return weave::WeaveStore::load(path);
    if (must_exist) throw Error(Errc::NotFound, "no weave snapshot at " + path);
    return weave::WeaveStore{};
}

keystore::Keystore open_keystore(const std::string& path, const std::string& passphrase,
                                 bool create_if_missing) {
    if (std::filesystem::exists(path)) return keystore::Keystore::load(path, passphrase);
    if (!create_if_missing) throw Error(Errc::NotFound, "no keystore at " + path);
    return keystore::Keystore{};
}

crypto::Ed25519KeyPair keypair_from_secret(const Bytes& secret) {
    if (secret.size() != 64) throw Error(Errc::InvalidKey, "auth secret must be 64 bytes");
    crypto::Ed25519KeyPair keypair;
    keypair.secret_key = secret;
    keypair.public_key = Bytes(secret.begin() + 32, secret.end());
    return keypair;
}

crypto::Ed25519KeyPair auth_key_of(const keystore::Keystore& store, const std::string& label) {
    auto it = store.keys().find(label + ".auth");
    if (it == store.keys().end()) {
        throw Error(Errc::NotFound, "keystore has no auth key for label " + label);
    }
    return keypair_from_secret(it->second);
}

std::optional<bbs::KeyPair> bbs_key_of(const keystore::Keystore& store,
                                       const std::string& label) {
    auto it = store.keys().find(label + ".bbs");
    if (it == store.keys().end()) return std::nullopt;
    return bbs::KeyPair::from_seed(it->second);
}

did::DidDocument build_document(const keystore::Keystore& store, const std::string& label) {
    const crypto::Ed25519KeyPair auth = auth_key_of(store, label);
    did::SubjectKeys keys{auth.public_key, std::nullopt};
    if (auto bbs_pair = bbs_key_of(store, label)) keys.bbs_public_key = bbs_pair->public_key;
    return did::create_document(keys);
}

vc::Schema schema_from_name(const std::string& name) {
    if (name == "none") return vc::Schema::None;
    if (name == "natural_person") return vc::Schema::EidasNaturalPerson;
    if (name == "legal_person") return vc::Schema::EidasLegalPerson;
    throw Error(Errc::ParseError, "unknown schema: " + name);
}

/// "age>=18", "age<=65" or "country in NL,DE,FR".
vc::PredicateSpec parse_predicate(const std::string& text) {
    vc::PredicateSpec spec;
    if (auto pos = text.find(">="); pos != std::string::npos) {
        spec.source_path = text.substr(0, pos);
        spec.op = vc::PredicateOp::GreaterOrEqual;
        spec.bound = std::stoll(text.substr(pos + 2));
        return spec;
    }
    if (auto pos = text.find("<="); pos != std::string::npos) {
        spec.source_path = text.substr(0, pos);
        spec.op = vc::PredicateOp::LessOrEqual;
        spec.bound = std::stoll(text.substr(pos + 2));
        return spec;
    }
    if (auto pos = text.find(" in "); pos != std::string::npos) {
        spec.source_path = text.substr(0, pos);
        spec.op = vc::PredicateOp::InSet;
        std::stringstream members(text.substr(pos + 4));
        std::string member;
        while (std::getline(members, member, ',')) {
            if (!member.empty()) spec.member_set.push_back(member);
        }
        return spec;
    }
    throw Error(Errc::ParseError, "predicate must look like 'age>=18' or 'country in NL,DE'");
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> parts;
    std::stringstream stream(csv);
    std::string part;
    while (std::getline(stream, part, ',')) {
        if (!part.empty()) parts.push_back(part);
    }
    return parts;
}

json value_to_json(const vc::ClaimValue& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    if (const auto* i = std::get_if<int64_t>(&value)) return *i;
    if (const auto* b = std::get_if<bool>(&value)) return *b;
    return std::get<vc::DateValue>(value).iso;
}

struct Printer {
    bool json_mode = false;

    void result(const json& machine, const std::string& human) const {
        if (json_mode) {
            std::cout << machine.dump() << "\n";
        } else {
            std::cout << human << "\n";
        }
    }
    void raw_json(const std::string& serialized) const { std::cout << serialized << "\n"; }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-sovereign identity over a permanent-storage weave"};
    app.require_subcommand(1);
    Printer out;
    app.add_flag("--json", out.json_mode, "machine-readable JSON output");
    int command_exit = 0;

    // Shared option storage. CLI11 copies nothing; these must outlive parse.
    std::string ks_path, passphrase, label, weave_path, ref, name, target;
    std::string claims_path, holder_label, holder_did, holder_key, schema_name = "none";
    std::string credential_path, presentation_path, reveal_csv, nonce_b64, out_path;
    std::string credential_id, scenario_path, seed_text, today_text, host = "127.0.0.1";
    std::vector<std::string> predicate_texts;
    bool with_bbs = false, kdf_min = false, mine_after = false, writable = false;
    bool deactivate = false;
    uint64_t doc_version = 0;
    int port = 0;

    auto* keygen = app.add_subcommand("keygen", "generate keys into an encrypted keystore");
    keygen->add_option("--keystore", ks_path, "keystore file")->required();
    keygen->add_option("--passphrase", passphrase, "keystore passphrase")->required();
    keygen->add_option("--label", label, "key label")->required();
    keygen->add_flag("--with-bbs", with_bbs, "also generate a credential signing key");
    keygen->add_flag("--kdf-min", kdf_min, "cheapest KDF parameters (tests only)");
    keygen->callback([&] {
        keystore::Keystore store = open_keystore(ks_path, passphrase, true);
        crypto::Ed25519KeyPair auth = crypto::Ed25519KeyPair::generate();
        store.put_key(label + ".auth", auth.secret_key);
        json machine;
        machine["label"] = label;
        machine["address"] = auth.address();
        machine["did"] = did::derive_did(auth.public_key);
        machine["auth_public_key"] = base64url_encode(auth.public_key);
        std::string human = "generated " + label + "\n  did: " +
                            machine["did"].get<std::string>();
        if (with_bbs) {
            const Bytes seed = crypto::system_rng().bytes(32);
            store.put_key(label + ".bbs", seed);
            machine["bbs_public_key"] = base64url_encode(bbs::KeyPair::from_seed(seed).public_key);
            human += "\n  credential signing key: yes";
        }
        store.save(ks_path, passphrase,
                   kdf_min ? keystore::KdfParams::minimal() : keystore::KdfParams::interactive());
        out.result(machine, human);
    });

    auto* did_cmd = app.add_subcommand("did", "decentralized identifier operations");
    did_cmd->require_subcommand(1);

    auto* did_create = did_cmd->add_subcommand("create", "build a document without publishing");
    did_create->add_option("--keystore", ks_path)->required();
    did_create->add_option("--passphrase", passphrase)->required();
    did_create->add_option("--label", label)->required();
    did_create->callback([&] {
        const keystore::Keystore store = open_keystore(ks_path, passphrase, false);
        out.raw_json(did::document_to_json(build_document(store, label)));
    });

    auto* did_publish = did_cmd->add_subcommand("publish", "publish a document to the weave");
    did_publish->add_option("--keystore", ks_path)->required();
    did_publish->add_option("--passphrase", passphrase)->required();
    did_publish->add_option("--label", label)->required();
    did_publish->add_option("--weave", weave_path)->required();
    did_publish->add_option("--version", doc_version, "versionSequence to publish");
    did_publish->add_flag("--deactivate", deactivate, "publish a deactivated version");
    did_publish->add_flag("--mine", mine_after, "seal a block right away");
    did_publish->callback([&] {
        const keystore::Keystore store = open_keystore(ks_path, passphrase, false);
        weave::WeaveStore weave = load_weave(weave_path, false);
        arns::NameRegistry names{weave};
        did::DidMethod dids{weave, names};
        did::DidDocument doc = build_document(store, label);
        doc.version_sequence = doc_version;
        doc.deactivated = deactivate;
        const weave::TxId tx = dids.publish(doc, auth_key_of(store, label));
        if (mine_after) weave.mine_block();
        weave.save(weave_path);
        json machine{{"did", doc.id}, {"tx", tx}, {"mined", mine_after}};
        out.result(machine, "published " + doc.id + "\n  tx: " + tx +
                                (mine_after ? "\n  sealed" : "\n  pending until the next mine"));
    });

    auto* did_resolve = did_cmd->add_subcommand("resolve", "resolve a DID or registered name");
    did_resolve->add_option("--weave", weave_path)->required();
    did_resolve->add_option("ref", ref, "DID or name")->required();
    did_resolve->callback([&] {
        weave::WeaveStore weave = load_weave(weave_path, true);
        arns::NameRegistry names{weave};
        did::DidMethod dids{weave, names};
        out.raw_json(did::document_to_json(dids.resolve(ref)));
    });

    auto* name_cmd = app.add_subcommand("name", "name registry operations");
    name_cmd->require_subcommand(1);

    auto add_name_write = [&](CLI::App* sub) {
        sub->add_option("--keystore", ks_path)->required();
        sub->add_option("--passphrase", passphrase)->required();
        sub->add_option("--label", label)->required();
        sub->add_option("--weave", weave_path)->required();
        sub->add_option("name", name, "name to claim")->required();
        sub->add_option("target", target, "transaction id the name points at")->required();
        sub->add_flag("--mine", mine_after, "seal a block right away");
    };

    auto* name_register = name_cmd->add_subcommand("register", "claim a free name");
    add_name_write(name_register);
    name_register->callback([&] {
        const keystore::Keystore store = open_keystore(ks_path, passphrase, false);
        weave::WeaveStore weave = load_weave(weave_path, true);
        arns::NameRegistry names{weave};
        const arns::NameRecord record =
            names.register_name(name, target, auth_key_of(store, label));
        if (mine_after) weave.mine_block();
        weave.save(weave_path);
        json machine{{"name", name}, {"target", target}, {"sequence", record.sequence}};
        out.result(machine, "registered " + name + " -> " + target);
    });

    auto* name_update = name_cmd->add_subcommand("update", "re-point an owned name");
    add_name_write(name_update);
    name_update->callback([&] {
        const keystore::Keystore store = open_keystore(ks_path, passphrase, false);
        weave::WeaveStore weave = load_weave(weave_path, true);
        arns::NameRegistry names{weave};
        const arns::NameRecord record = names.update(name, target, auth_key_of(store, label));
        if (mine_after) weave.mine_block();
        weave.save(weave_path);
        json machine{{"name", name}, {"target", target}, {"sequence", record.sequence}};
        out.result(machine, "updated " + name + " -> " + target);
    });

    auto* name_resolve = name_cmd->add_subcommand("resolve", "resolve a name to its target");
    name_resolve->add_option("--weave", weave_path)->required();
    name_resolve->add_option("name", name)->required();
    name_resolve->callback([&] {
        weave::WeaveStore weave = load_weave(weave_path, true);
        arns::NameRegistry names{weave};
        const auto [tx, record] = names.resolve(name);
        json machine{{"name", name}, {"target", tx}, {"sequence", record.sequence}};
        out.result(machine, name + " -> " + tx);
    });

    auto* vc_cmd = app.add_subcommand("vc", "verifiable credential operations");
    vc_cmd->require_subcommand(1);

    auto* vc_issue = vc_cmd->add_subcommand("issue", "sign a credential over a claim set");
    vc_issue->add_option("--keystore", ks_path)->required();
    vc_issue->add_option("--passphrase", passphrase)->required();
    vc_issue->add_option("--issuer-label", label)->required();
    vc_issue->add_option("--weave", weave_path)->required();
    vc_issue->add_option("--claims", claims_path, "JSON file with the claim object")->required();
    vc_issue->add_option("--holder-label", holder_label, "holder key label in the keystore");
    vc_issue->add_option("--holder-did", holder_did, "holder DID (with --holder-key)");
    vc_issue->add_option("--holder-key", holder_key, "holder public key, base64url");
    vc_issue->add_option("--schema", schema_name, "none | natural_person | legal_person");
    vc_issue->add_option("--predicate", predicate_texts, "e.g. age>=18 (repeatable)");
    vc_issue->add_option("--today", today_text, "predicate evaluation date, YYYY-MM-DD");
    vc_issue->add_option("--out", out_path, "write the credential JSON here");
    vc_issue->callback([&] {
        const keystore::Keystore store = open_keystore(ks_path, passphrase, false);
        weave::WeaveStore weave = load_weave(weave_path, true);
        arns::NameRegistry names{weave};
        did::DidMethod dids{weave, names};
        vc::CredentialService credentials{weave, dids};

        const auto issuer_bbs = bbs_key_of(store, label);
        if (!issuer_bbs) throw Error(Errc::NotIssuer, "label has no credential signing key");
        const did::Did issuer = did::derive_did(auth_key_of(store, label).public_key);

        Bytes holder_pubkey;
        did::Did holder;
        if (!holder_label.empty()) {
            holder_pubkey = auth_key_of(store, holder_label).public_key;
            holder = did::derive_did(holder_pubkey);
        } else if (!holder_did.empty() && !holder_key.empty()) {
            holder_pubkey = base64url_decode(holder_key);
            holder = holder_did;
        } else {
            throw Error(Errc::ParseError, "give --holder-label or --holder-did + --holder-key");
        }

        const vc::ClaimSet claims = vc::claim_set_from_json(read_file(claims_path));
        std::vector<vc::PredicateSpec> predicates;
        for (const auto& text : predicate_texts) predicates.push_back(parse_predicate(text));
        std::optional<vc::DateValue> today;
        if (!today_text.empty()) today = vc::DateValue{today_text};

        const vc::Credential credential = credentials.issue_with_predicates(
            issuer_bbs->secret, issuer, holder, holder_pubkey, claims, predicates,
            schema_from_name(schema_name), today);
        const std::string serialized = vc::credential_to_json(credential);
        if (!out_path.empty()) write_file(out_path, serialized);
        json machine{{"id", credential.id}, {"issuer", issuer}, {"holder", holder}};
        if (!out_path.empty()) machine["out"] = out_path;
        out.result(out_path.empty() ? json::parse(serialized) : machine,
                   out_path.empty() ? serialized
                                    : "issued " + credential.id + " -> " + out_path);
    });

    auto* vc_present = vc_cmd->add_subcommand("present", "derive a selective disclosure proof");
    vc_present->add_option("--weave", weave_path)->required();
    vc_present->add_option("--credential", credential_path)->required();
    vc_present->add_option("--reveal", reveal_csv, "comma-separated claim paths")->required();
    vc_present->add_option("--nonce", nonce_b64, "verifier nonce, base64url")->required();
    vc_present->add_option("--out", out_path, "write the presentation JSON here");
    vc_present->callback([&] {
        weave::WeaveStore weave = load_weave(weave_path, true);
        arns::NameRegistry names{weave};
        did::DidMethod dids{weave, names};
        vc::CredentialService credentials{weave, dids};

        const vc::Credential credential = vc::credential_from_json(read_file(credential_path));
        std::set<std::string> reveal;
        for (const auto& path : split_csv(reveal_csv)) reveal.insert(path);
        const vc::Presentation presentation =
            credentials.present(credential, reveal, base64url_decode(nonce_b64));
        const std::string serialized = vc::presentation_to_json(presentation);
        if (!out_path.empty()) {
            write_file(out_path, serialized);
            json machine{{"credential_id", presentation.credential_id},
                         {"disclosed", presentation.disclosed.size()},
                         {"out", out_path}};
            out.result(machine, "presentation for " + presentation.credential_id + " -> " +
                                    out_path);
        } else {
            out.raw_json(serialized);
        }
    });

    auto* vc_verify = vc_cmd->add_subcommand("verify", "check a presentation against a nonce");
    vc_verify->add_option("--weave", weave_path)->required();
    vc_verify->add_option("--presentation", presentation_path)->required();
    vc_verify->add_option("--nonce", nonce_b64, "expected nonce, base64url")->required();
    vc_verify->callback([&] {
        weave::WeaveStore weave = load_weave(weave_path, true);
        arns::NameRegistry names{weave};
        did::DidMethod dids{weave, names};
        vc::CredentialService credentials{weave, dids};

        const vc::Presentation presentation =
            vc::presentation_from_json(read_file(presentation_path));
        const vc::VerificationOutcome outcome =
            credentials.verify_presentation(presentation, base64url_decode(nonce_b64));
        json machine;
        machine["result"] = outcome.accepted ? "ACCEPT" : "REJECT";
        std::string human;
        if (outcome.accepted) {
            json disclosed = json::object();
            human = "ACCEPT";
            for (const auto& claim : presentation.disclosed) {
                disclosed[claim.path] = value_to_json(claim.value);
                human += "\n  " + claim.path + " = " + vc::value_text(claim.value);
            }
            machine["disclosed"] = disclosed;
        } else {
            machine["reason"] = vc::reject_reason_name(outcome.reason);
            machine["detail"] = outcome.detail;
            human = std::string("REJECT (") + vc::reject_reason_name(outcome.reason) + ")" +
                    (outcome.detail.empty() ? "" : ": " + outcome.detail);
            command_exit = 1;
        }
        out.result(machine, human);
    });

    auto* revoke = app.add_subcommand("revoke", "publish a revocation for a credential id");
    revoke->add_option("--keystore", ks_path)->required();
    revoke->add_option("--passphrase", passphrase)->required();
    revoke->add_option("--issuer-label", label)->required();
    revoke->add_option("--weave", weave_path)->required();
    revoke->add_option("--credential-id", credential_id)->required();
    revoke->callback([&] {
        const keystore::Keystore store = open_keystore(ks_path, passphrase, false);
        weave::WeaveStore weave = load_weave(weave_path, true);
        arns::NameRegistry names{weave};
        did::DidMethod dids{weave, names};
        vc::CredentialService credentials{weave, dids};
        const crypto::Ed25519KeyPair auth = auth_key_of(store, label);
        const weave::TxId tx =
            credentials.revoke(auth, did::derive_did(auth.public_key), credential_id);
        weave.save(weave_path);
        json machine{{"credential_id", credential_id}, {"revocation_tx", tx}};
        out.result(machine, "revoked " + credential_id + "\n  tx: " + tx);
    });

    auto* scenario_cmd = app.add_subcommand("scenario", "scripted end-to-end runs");
    scenario_cmd->require_subcommand(1);
    auto* scenario_run = scenario_cmd->add_subcommand("run", "run a scenario script");
    scenario_run->add_option("file", scenario_path, "scenario JSON file")->required();
    scenario_run->add_option("--seed", seed_text, "deterministic randomness seed");
    scenario_run->add_option("--weave", weave_path, "save the final weave snapshot here");
    scenario_run->callback([&] {
        weave::WeaveStore weave;
        arns::NameRegistry names{weave};
        did::DidMethod dids{weave, names};
        vc::CredentialService credentials{weave, dids};
        std::unique_ptr<crypto::SeededRng> seeded;
        if (!seed_text.empty()) {
            const crypto::Digest digest = crypto::sha256(seed_text);
            seeded = std::make_unique<crypto::SeededRng>(Bytes(digest.begin(), digest.end()));
        }
        protocol::ProtocolEngine engine{weave, names, dids, credentials,
                                        seeded ? *seeded : crypto::system_rng()};
        protocol::ScenarioRunner runner(engine);
        const protocol::ScenarioReport report = runner.run(read_file(scenario_path));
        if (!weave_path.empty()) weave.save(weave_path);
        if (out.json_mode) {
            out.raw_json(protocol::report_to_json(report));
        } else {
            for (const auto& event : report.events) {
                std::cout << "[" << event.step << "] " << event.action << " " << event.actor
                          << ": " << event.note << "\n";
            }
            std::cout << (report.all_ok ? "scenario complete" : "scenario failed") << "\n";
        }
        if (!report.all_ok || report.rejected) command_exit = 1;
    });

    auto* weave_cmd = app.add_subcommand("weave", "weave maintenance");
    weave_cmd->require_subcommand(1);

    auto* weave_mine = weave_cmd->add_subcommand("mine", "seal pending transactions");
    weave_mine->add_option("--weave", weave_path)->required();
    weave_mine->callback([&] {
        weave::WeaveStore weave = load_weave(weave_path, true);
        const weave::Block block = weave.mine_block();
        weave.save(weave_path);
        json machine{{"height", block.height}, {"transactions", block.tx_ids.size()},
                     {"id", block.block_id}};
        out.result(machine, "sealed block " + std::to_string(block.height) + " with " +
                                std::to_string(block.tx_ids.size()) + " transaction(s)");
    });

    auto* weave_verify = weave_cmd->add_subcommand("verify", "replay and check the whole chain");
    weave_verify->add_option("--weave", weave_path)->required();
    weave_verify->callback([&] {
        const weave::WeaveStore weave = load_weave(weave_path, true);
        std::vector<std::string> diagnostics;
        const bool ok = weave.verify_weave(&diagnostics);
        json machine{{"ok", ok}, {"diagnostics", diagnostics}};
        std::string human = ok ? "weave verified" : "weave corrupt";
        for (const auto& d : diagnostics) human += "\n  " + d;
        out.result(machine, human);
        if (!ok) command_exit = 1;
    });

    auto* weave_stats = weave_cmd->add_subcommand("stats", "counts and tip");
    weave_stats->add_option("--weave", weave_path)->required();
    weave_stats->callback([&] {
        const weave::WeaveStore weave = load_weave(weave_path, true);
        json machine{{"blocks", weave.block_count()},
                     {"sealed_transactions", weave.sealed_tx_count()},
                     {"pending", weave.pending_count()}};
        std::string human = std::to_string(weave.block_count()) + " block(s), " +
                            std::to_string(weave.sealed_tx_count()) + " sealed, " +
                            std::to_string(weave.pending_count()) + " pending";
        if (weave.block_count() > 0) {
            machine["tip"] = weave.tip().block_id;
            human += "\n  tip: " + weave.tip().block_id;
        }
        out.result(machine, human);
    });

    auto* serve = app.add_subcommand("serve", "serve a weave snapshot over HTTP");
    serve->add_option("--weave", weave_path)->required();
    serve->add_option("--host", host);
    serve->add_option("--port", port, "0 picks a free port");
    serve->add_flag("--writable", writable, "accept POST /tx submissions");
    serve->callback([&] {
        weave::WeaveStore weave = load_weave(weave_path, true);
        gateway::GatewayConfig config;
        config.host = host;
        config.port = port;
        config.writable = writable;
        gateway::Gateway gw(weave, config);
        const int bound = gw.start();
        json machine{{"url", gw.base_url()}, {"port", bound}, {"writable", writable}};
        out.result(machine, "serving " + weave_path + " at " + gw.base_url() +
                                (writable ? " (writable)" : " (read-only)"));
        std::cout.flush();  // scripts read the bound port before we block
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        while (!g_stop && gw.running()) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        gw.stop();
        if (writable) weave.save(weave_path);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const Error& e) {
        if (out.json_mode) {
            json machine{{"error", e.what()}, {"code", errc_name(e.code())}};
            std::cerr << machine.dump() << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        if (e.code() == Errc::ParseError) return 2;
        if (e.code() == Errc::Internal) return 3;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return command_exit;
}
