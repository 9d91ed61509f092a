#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace tarski {

inline constexpr const char* kSchema = "tarskikit/1";

// Outcome of a verification pass. Failures are values, not exceptions:
// a report either passes or carries concrete witness points.
struct VerificationReport {
    std::string kind;
    int depth = 0;
    bool pass = true;
    std::map<std::string, std::int64_t> counts;
    std::vector<std::string> witnesses;
    std::vector<std::string> notes;

    void fail(std::string witness) {
        pass = false;
        if (witnesses.size() < 32) witnesses.push_back(std::move(witness));
    }
    void note(std::string text) { notes.push_back(std::move(text)); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema"] = kSchema;
        j["kind"] = kind;
        j["depth"] = depth;
        j["pass"] = pass;
        j["counts"] = nlohmann::json::object();
        for (const auto& [k, v] : counts) j["counts"][k] = v;
        j["witnesses"] = witnesses;
        j["notes"] = notes;
        return j;
    }

    std::string summary() const {
        std::string s = kind + " at depth " + std::to_string(depth) + ": " +
                        (pass ? "pass" : "FAIL");
        if (!pass && !witnesses.empty()) s += " (witness: " + witnesses.front() + ")";
        return s;
    }
};

}  // namespace tarski
