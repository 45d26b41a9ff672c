#include "legweb/report.hpp"

#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace legweb::report {

std::string verdict_str(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::ResidualPublished: return "residual-published";
    }
    return "?";
}

void Report::add(CheckRecord rec) {
    for (auto& c : checks_)
        if (c.id == rec.id) throw std::logic_error("duplicate check id: " + rec.id);
    checks_.push_back(std::move(rec));
}

CheckRecord& Report::pass(const std::string& id, const std::string& tag) {
    add(CheckRecord{id, tag, Verdict::Pass, nlohmann::ordered_json::object(), 0});
    return checks_.back();
}

CheckRecord& Report::check(const std::string& id, const std::string& tag, bool ok) {
    add(CheckRecord{id, tag, ok ? Verdict::Pass : Verdict::Fail,
                    nlohmann::ordered_json::object(), 0});
    return checks_.back();
}

CheckRecord& Report::residual(const std::string& id, const std::string& tag,
                              const std::string& payload) {
    CheckRecord rec{id, tag, Verdict::ResidualPublished, nlohmann::ordered_json::object(), 0};
    rec.detail["residual"] = payload;
    add(std::move(rec));
    return checks_.back();
}

void Report::apply_waivers(const std::vector<std::string>& ids) {
    for (auto& rec : checks_) {
        if (rec.verdict != Verdict::Fail) continue;
        for (auto& id : ids) {
            if (rec.id == id) {
                rec.verdict = Verdict::ResidualPublished;
                rec.detail["waived"] = true;
            }
        }
    }
}

bool Report::all_pass() const {
    for (auto& c : checks_)
        if (c.verdict == Verdict::Fail) return false;
    return true;
}

nlohmann::ordered_json Report::body() const {
    nlohmann::ordered_json b;
    b["schema_version"] = 1;
    b["suite"] = suite;
    b["seed"] = seed;
    b["config"] = config;
    auto arr = nlohmann::ordered_json::array();
    for (auto& c : checks_) {
        nlohmann::ordered_json r;
        r["id"] = c.id;
        r["tag"] = c.tag;
        r["verdict"] = verdict_str(c.verdict);
        r["detail"] = c.detail;
        arr.push_back(std::move(r));
    }
    b["checks"] = std::move(arr);
    nlohmann::ordered_json summary;
    int np = 0, nf = 0, nr = 0;
    for (auto& c : checks_) {
        if (c.verdict == Verdict::Pass) ++np;
        if (c.verdict == Verdict::Fail) ++nf;
        if (c.verdict == Verdict::ResidualPublished) ++nr;
    }
    summary["pass"] = np;
    summary["fail"] = nf;
    summary["residual_published"] = nr;
    b["summary"] = std::move(summary);
    return b;
}

std::string Report::body_bytes() const { return body().dump(2); }

nlohmann::ordered_json Report::full() const {
    nlohmann::ordered_json f;
    f["body"] = body();
    f["body_sha256"] = sha256_hex(body_bytes());
    auto t = nlohmann::ordered_json::object();
    double total = 0;
    for (auto& c : checks_) {
        t[c.id] = c.ms;
        total += c.ms;
    }
    f["timing_ms"] = std::move(t);
    f["timing_total_ms"] = total;
    return f;
}

std::string Report::human() const {
    auto b = body();
    std::ostringstream os;
    os << "suite " << b["suite"].get<std::string>() << " (seed " << b["seed"].get<long>()
       << ")\n";
    for (auto& c : b["checks"]) {
        os << "  [" << c["verdict"].get<std::string>() << "] " << c["id"].get<std::string>();
        if (c["verdict"] != "pass" && !c["detail"].empty()) os << "  " << c["detail"].dump();
        os << "\n";
    }
    os << "summary: " << b["summary"]["pass"] << " pass, " << b["summary"]["fail"]
       << " fail, " << b["summary"]["residual_published"] << " residual-published\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Compact SHA-256 (FIPS 180-4), enough for report body hashing.

namespace {
constexpr std::array<std::uint32_t, 64> K = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }
} // namespace

std::string sha256_hex(const std::string& bytes) {
    std::array<std::uint32_t, 8> h = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                      0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::string msg = bytes;
    std::uint64_t bitlen = std::uint64_t(msg.size()) * 8;
    msg.push_back(char(0x80));
    while (msg.size() % 64 != 56) msg.push_back(char(0));
    for (int i = 7; i >= 0; --i) msg.push_back(char((bitlen >> (8 * i)) & 0xff));
    for (std::size_t off = 0; off < msg.size(); off += 64) {
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(std::uint8_t(msg[off + 4 * i])) << 24) |
                   (std::uint32_t(std::uint8_t(msg[off + 4 * i + 1])) << 16) |
                   (std::uint32_t(std::uint8_t(msg[off + 4 * i + 2])) << 8) |
                   std::uint32_t(std::uint8_t(msg[off + 4 * i + 3]));
        for (int i = 16; i < 64; ++i) {
            std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, hh] = h;
        for (int i = 0; i < 64; ++i) {
            std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            std::uint32_t ch = (e & f) ^ (~e & g);
            std::uint32_t t1 = hh + S1 + ch + K[std::size_t(i)] + w[i];
            std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            std::uint32_t mj = (a & b) ^ (a & c) ^ (b & c);
            std::uint32_t t2 = S0 + mj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (std::uint32_t x : h)
        for (int i = 7; i >= 0; --i) out.push_back(hex[(x >> (4 * i)) & 0xf]);
    return out;
}

} // namespace legweb::report
