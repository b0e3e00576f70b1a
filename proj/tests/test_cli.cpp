#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "permadid/bytes.hpp"

// Drives the installed binary exactly like a user would: fresh working
// directory per case, real process spawns, assertions on stdout text and
// exit codes.

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kCli = PERMADID_CLI_PATH;
const char* kFixtureDir = PERMADID_FIXTURE_DIR;

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr merged
};

std::string shell_quote(const std::string& arg) {
    std::string quoted = "'";
    for (char c : arg) {
        if (c == '\'') {
            quoted += "'\\''";
        } else {
            quoted += c;
        }
    }
    quoted += "'";
    return quoted;
}

CommandResult run_cli(const fs::path& workdir, const std::vector<std::string>& args) {
    std::string command = "cd " + shell_quote(workdir.string()) + " && " + shell_quote(kCli);
    for (const auto& arg : args) command += " " + shell_quote(arg);
    command += " 2>&1";

    CommandResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    size_t n = 0;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.output.append(buffer, n);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("permadid_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int value = 0;
        return value;
    }
};

void write_text(const fs::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    REQUIRE(out.good());
    out << content;
}

std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string fixture(const std::string& name) {
    return (fs::path(kFixtureDir) / name).string();
}

std::string fresh_nonce(char fill) {
    return permadid::base64url_encode(permadid::Bytes(32, static_cast<uint8_t>(fill)));
}

// keygen for issuer+holder, publish both documents and register the
// holder's name. Returns the holder's resolved DID.
struct CliWorld {
    TempDir dir;
    std::vector<std::string> ks{"--keystore", "ks.json", "--passphrase", "pw"};

    CommandResult cli(std::vector<std::string> args) { return run_cli(dir.path, args); }

    std::string setup_identities() {
        auto gov = cli({"--json", "keygen", "--keystore", "ks.json", "--passphrase", "pw",
                        "--label", "gov", "--with-bbs", "--kdf-min"});
        REQUIRE(gov.exit_code == 0);
        auto alice = cli({"--json", "keygen", "--keystore", "ks.json", "--passphrase", "pw",
                          "--label", "alice", "--kdf-min"});
        REQUIRE(alice.exit_code == 0);
        for (const char* label : {"gov", "alice"}) {
            auto published =
                cli({"--json", "did", "publish", "--keystore", "ks.json", "--passphrase", "pw",
                     "--label", label, "--weave", "w.bin", "--mine"});
            REQUIRE(published.exit_code == 0);
            if (std::string(label) == "alice") {
                const json detail = json::parse(published.output);
                auto registered = cli({"name", "register", "--keystore", "ks.json",
                                       "--passphrase", "pw", "--label", "alice", "--weave",
                                       "w.bin", "alice", detail["tx"].get<std::string>(),
                                       "--mine"});
                REQUIRE(registered.exit_code == 0);
            }
        }
        return json::parse(alice.output)["did"].get<std::string>();
    }

    void issue_age_credential() {
        write_text(dir.path / "claims.json", R"({"name": "Alice", "age": 25})");
        auto issued = cli({"vc", "issue", "--keystore", "ks.json", "--passphrase", "pw",
                           "--issuer-label", "gov", "--weave", "w.bin", "--claims", "claims.json",
                           "--holder-label", "alice", "--predicate", "age>=18", "--out",
                           "cred.json"});
        REQUIRE(issued.exit_code == 0);
    }
};

}  // namespace

TEST_CASE("scenario fixture walks all three phases") {
    TempDir dir;
    auto plain = run_cli(dir.path, {"scenario", "run", fixture("alice_age.json"), "--seed", "t"});
    CAPTURE(plain.output);
    CHECK(plain.exit_code == 0);
    CHECK(plain.output.find("setup gov: issuer did:arweave:") != std::string::npos);
    CHECK(plain.output.find("setup alice: holder") != std::string::npos);
    CHECK(plain.output.find("name=alice") != std::string::npos);
    CHECK(plain.output.find("issue gov: credential urn:permadid:") != std::string::npos);
    CHECK(plain.output.find("ACCEPT disclosed age=25") != std::string::npos);
    CHECK(plain.output.find("ACCEPT disclosed ageOver18=true") != std::string::npos);
    CHECK(plain.output.find("REJECT (NonceMismatch)") != std::string::npos);
    CHECK(plain.output.find("as expected") != std::string::npos);
    CHECK(plain.output.find("scenario complete") != std::string::npos);

    auto machine =
        run_cli(dir.path, {"--json", "scenario", "run", fixture("alice_age.json")});
    REQUIRE(machine.exit_code == 0);
    const json report = json::parse(machine.output);
    CHECK(report["all_ok"] == true);
    CHECK(report["rejected"] == false);
    CHECK(report["events"].size() == 7);
    CHECK(report["events"][4]["data"]["result"] == "ACCEPT");
    CHECK(report["events"][4]["data"]["disclosed"]["age"] == 25);
}

TEST_CASE("keygen, publish, name and resolution compose across invocations") {
    CliWorld w;
    const std::string alice_did = w.setup_identities();

    auto by_name = w.cli({"did", "resolve", "--weave", "w.bin", "alice"});
    REQUIRE(by_name.exit_code == 0);
    const json doc = json::parse(by_name.output);
    CHECK(doc["id"] == alice_did);
    CHECK(doc["versionSequence"] == 0);

    auto by_did = w.cli({"did", "resolve", "--weave", "w.bin", alice_did});
    REQUIRE(by_did.exit_code == 0);
    CHECK(by_did.output == by_name.output);

    auto named = w.cli({"--json", "name", "resolve", "--weave", "w.bin", "alice"});
    REQUIRE(named.exit_code == 0);
    CHECK(json::parse(named.output)["name"] == "alice");

    auto healthy = w.cli({"weave", "verify", "--weave", "w.bin"});
    CHECK(healthy.exit_code == 0);
    CHECK(healthy.output.find("weave verified") != std::string::npos);
}

TEST_CASE("issue, present, verify through credential files") {
    CliWorld w;
    w.setup_identities();
    w.issue_age_credential();

    const std::string nonce = fresh_nonce('a');
    auto presented = w.cli({"vc", "present", "--weave", "w.bin", "--credential", "cred.json",
                            "--reveal", "age,ageOver18", "--nonce", nonce, "--out", "pres.json"});
    REQUIRE(presented.exit_code == 0);

    auto accepted = w.cli({"--json", "vc", "verify", "--weave", "w.bin", "--presentation",
                           "pres.json", "--nonce", nonce});
    CAPTURE(accepted.output);
    CHECK(accepted.exit_code == 0);
    const json verdict = json::parse(accepted.output);
    CHECK(verdict["result"] == "ACCEPT");
    CHECK(verdict["disclosed"]["age"] == 25);
    CHECK(verdict["disclosed"]["ageOver18"] == true);
    CHECK(verdict["disclosed"].size() == 2);

    auto human = w.cli({"vc", "verify", "--weave", "w.bin", "--presentation", "pres.json",
                        "--nonce", nonce});
    CHECK(human.exit_code == 0);
    CHECK(human.output.find("ACCEPT") != std::string::npos);
    CHECK(human.output.find("age = 25") != std::string::npos);
}

TEST_CASE("altered disclosed value exits 1 with BadProof") {
    CliWorld w;
    w.setup_identities();
    w.issue_age_credential();

    const std::string nonce = fresh_nonce('b');
    REQUIRE(w.cli({"vc", "present", "--weave", "w.bin", "--credential", "cred.json", "--reveal",
                   "age", "--nonce", nonce, "--out", "pres.json"})
                .exit_code == 0);

    json tampered = json::parse(read_text(w.dir.path / "pres.json"));
    REQUIRE(tampered["disclosed"][0]["path"] == "age");
    tampered["disclosed"][0]["value"] = 52;
    write_text(w.dir.path / "tampered.json", tampered.dump());

    auto rejected = w.cli({"vc", "verify", "--weave", "w.bin", "--presentation", "tampered.json",
                           "--nonce", nonce});
    CAPTURE(rejected.output);
    CHECK(rejected.exit_code == 1);
    CHECK(rejected.output.find("REJECT (BadProof)") != std::string::npos);

    auto wrong_nonce = w.cli({"vc", "verify", "--weave", "w.bin", "--presentation", "pres.json",
                              "--nonce", fresh_nonce('c')});
    CHECK(wrong_nonce.exit_code == 1);
    CHECK(wrong_nonce.output.find("NonceMismatch") != std::string::npos);
}

TEST_CASE("revocation flips verification to REJECT across invocations") {
    CliWorld w;
    w.setup_identities();
    w.issue_age_credential();
    const std::string id = json::parse(read_text(w.dir.path / "cred.json"))["id"];

    auto revoked = w.cli({"revoke", "--keystore", "ks.json", "--passphrase", "pw",
                          "--issuer-label", "gov", "--weave", "w.bin", "--credential-id", id});
    REQUIRE(revoked.exit_code == 0);

    const std::string nonce = fresh_nonce('d');
    REQUIRE(w.cli({"vc", "present", "--weave", "w.bin", "--credential", "cred.json", "--reveal",
                   "age", "--nonce", nonce, "--out", "pres.json"})
                .exit_code == 0);
    auto verdict = w.cli({"vc", "verify", "--weave", "w.bin", "--presentation", "pres.json",
                          "--nonce", nonce});
    CHECK(verdict.exit_code == 1);
    CHECK(verdict.output.find("Revoked") != std::string::npos);
}

TEST_CASE("exit codes separate protocol rejects, usage errors and success") {
    TempDir dir;
    auto missing = run_cli(dir.path, {"name", "resolve", "--weave", "missing.bin", "alice"});
    CHECK(missing.exit_code == 1);
    CHECK(missing.output.find("NotFound") != std::string::npos);

    write_text(dir.path / "bad.json", "not json");
    auto malformed = run_cli(dir.path, {"scenario", "run", "bad.json"});
    CHECK(malformed.exit_code == 2);

    auto unknown = run_cli(dir.path, {"vc", "frobnicate"});
    CHECK(unknown.exit_code == 2);

    auto help = run_cli(dir.path, {"--help"});
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("scenario") != std::string::npos);

    auto no_args = run_cli(dir.path, {});
    CHECK(no_args.exit_code == 2);
}

TEST_CASE("wrong keystore passphrase is a protocol failure, not a crash") {
    CliWorld w;
    w.setup_identities();
    auto denied = w.cli({"did", "create", "--keystore", "ks.json", "--passphrase", "nope",
                         "--label", "gov"});
    CHECK(denied.exit_code == 1);
    CHECK(denied.output.find("WrongPassphrase") != std::string::npos);
    CHECK(denied.output.find("pw") == std::string::npos);
}

TEST_CASE("weave stats track the growing chain") {
    CliWorld w;
    w.setup_identities();
    auto stats = w.cli({"--json", "weave", "stats", "--weave", "w.bin"});
    REQUIRE(stats.exit_code == 0);
    const json counts = json::parse(stats.output);
    CHECK(counts["blocks"].get<int>() >= 3);
    CHECK(counts["pending"] == 0);
    CHECK(counts["sealed_transactions"].get<int>() >= 3);
}
