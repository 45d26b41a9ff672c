#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace legweb::report {

enum class Verdict { Pass, Fail, ResidualPublished };

std::string verdict_str(Verdict v);

struct CheckRecord {
    std::string id;  // unique, stable across runs
    std::string tag; // check family ("structure", "deformation", ..., "plumbing")
    Verdict verdict = Verdict::Fail;
    nlohmann::ordered_json detail = nlohmann::ordered_json::object();
    double ms = 0; // excluded from the deterministic body
};

class Report {
  public:
    std::string suite;
    long seed = 0;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();

    void add(CheckRecord rec);
    CheckRecord& pass(const std::string& id, const std::string& tag);
    CheckRecord& check(const std::string& id, const std::string& tag, bool ok);
    CheckRecord& residual(const std::string& id, const std::string& tag,
                          const std::string& payload);

    const std::vector<CheckRecord>& checks() const { return checks_; }
    // Failed checks whose ids were waived become residual-published, with the
    // waiver recorded in the detail payload.
    void apply_waivers(const std::vector<std::string>& ids);
    bool all_pass() const; // residual-published counts as pass
    int exit_code() const { return all_pass() ? 0 : 1; }

    // Deterministic body: identical (config, seed) must give identical bytes.
    nlohmann::ordered_json body() const;
    std::string body_bytes() const;
    nlohmann::ordered_json full() const; // body + sha256 + timings
    std::string human() const;           // rendered from the body json

  private:
    std::vector<CheckRecord> checks_;
};

std::string sha256_hex(const std::string& bytes);

} // namespace legweb::report
