#include "lrmsim/lrmsim.h"

#include <memory>
#include <new>
#include <string>

#include "commands.hpp"
#include "error.hpp"
#include "profile.hpp"
#include "suites.hpp"

struct lrm_result {
    lrmsim::CommandResult res;
    std::string summary;
};

struct lrm_profile {
    lrmsim::OccupationProfile profile;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

lrm_status fail(lrm_status s, const std::string& what) {
    g_last_error = what;
    return s;
}

template <class F>
lrm_status guarded(F&& fn) {
    try {
        g_last_error.clear();
        fn();
        return LRM_OK;
    } catch (const lrmsim::Error& e) {
        switch (e.code()) {
            case lrmsim::ErrorCode::InvalidParameter: return fail(LRM_INVALID_PARAMETER, e.what());
            case lrmsim::ErrorCode::RangeError: return fail(LRM_RANGE_ERROR, e.what());
            case lrmsim::ErrorCode::Io: return fail(LRM_IO_ERROR, e.what());
        }
        return fail(LRM_INTERNAL_ERROR, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(LRM_INVALID_PARAMETER, std::string("invalid JSON: ") + e.what());
    } catch (const std::bad_alloc&) {
        return fail(LRM_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(LRM_INTERNAL_ERROR, e.what());
    }
}

nlohmann::json parse_config(const char* text) {
    if (!text || !*text) return nlohmann::json::object();
    return nlohmann::json::parse(text);
}

}  // namespace

extern "C" {

const char* lrm_version(void) { return lrmsim::library_version(); }

const char* lrm_last_error(void) { return g_last_error.c_str(); }

const char* lrm_command_list(void) {
    static const std::string s = nlohmann::json(lrmsim::command_names()).dump();
    return s.c_str();
}

const char* lrm_suite_list(void) {
    static const std::string s = nlohmann::json(lrmsim::suite_names()).dump();
    return s.c_str();
}

lrm_status lrm_run(const char* command, const char* config_json, lrm_result** out) {
    if (!command || !out) return fail(LRM_INVALID_PARAMETER, "lrm_run: null argument");
    *out = nullptr;
    return guarded([&] {
        auto r = std::make_unique<lrm_result>();
        r->res = lrmsim::run_command(command, parse_config(config_json));
        r->summary = r->res.summary.dump();
        *out = r.release();
    });
}

lrm_status lrm_suite_defaults(const char* suite, lrm_result** out) {
    if (!suite || !out) return fail(LRM_INVALID_PARAMETER, "lrm_suite_defaults: null argument");
    *out = nullptr;
    return guarded([&] {
        auto r = std::make_unique<lrm_result>();
        r->res.summary = lrmsim::suite_defaults(suite);
        r->summary = r->res.summary.dump();
        *out = r.release();
    });
}

void lrm_result_free(lrm_result* r) { delete r; }

size_t lrm_result_table_count(const lrm_result* r) { return r ? r->res.tables.size() : 0; }

const char* lrm_result_table_name(const lrm_result* r, size_t i) {
    if (!r || i >= r->res.tables.size()) return nullptr;
    return r->res.tables[i].name.c_str();
}

const char* lrm_result_table_csv(const lrm_result* r, size_t i, size_t* length) {
    if (!r || i >= r->res.tables.size()) {
        if (length) *length = 0;
        return nullptr;
    }
    if (length) *length = r->res.tables[i].csv.size();
    return r->res.tables[i].csv.c_str();
}

const char* lrm_result_summary(const lrm_result* r) { return r ? r->summary.c_str() : nullptr; }

int lrm_result_passed(const lrm_result* r) { return r && r->res.pass ? 1 : 0; }

lrm_status lrm_profile_create(const char* spec, double lo, double hi, lrm_profile** out) {
    if (!spec || !out) return fail(LRM_INVALID_PARAMETER, "lrm_profile_create: null argument");
    *out = nullptr;
    return guarded([&] {
        const std::string s = spec;
        auto p = std::make_unique<lrm_profile>();
        const auto first = s.find_first_not_of(" \t\n");
        if (first != std::string::npos && s[first] == '{') {
            auto j = nlohmann::json::parse(s);
            if (!j.contains("domain")) j["domain"] = {lo, hi};
            p->profile = lrmsim::OccupationProfile::from_json(j.dump());
        } else {
            std::size_t used = 0;
            double c = 0.0;
            try {
                c = std::stod(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            p->profile = (used == s.size() && used > 0) ? lrmsim::OccupationProfile::constant(c, lo, hi)
                                                        : lrmsim::OccupationProfile::builtin(s, lo, hi);
        }
        p->json = p->profile.to_json();
        *out = p.release();
    });
}

void lrm_profile_free(lrm_profile* p) { delete p; }

lrm_status lrm_profile_eval(const lrm_profile* p, double x, double* value) {
    if (!p || !value) return fail(LRM_INVALID_PARAMETER, "lrm_profile_eval: null argument");
    return guarded([&] { *value = p->profile(x); });
}

lrm_status lrm_profile_hash(const lrm_profile* p, uint64_t* hash) {
    if (!p || !hash) return fail(LRM_INVALID_PARAMETER, "lrm_profile_hash: null argument");
    *hash = p->profile.hash();
    return LRM_OK;
}

const char* lrm_profile_json(const lrm_profile* p) { return p ? p->json.c_str() : nullptr; }

}  // extern "C"
