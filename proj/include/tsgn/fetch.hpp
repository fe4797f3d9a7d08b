// Copyright 2026 The TSGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "tsgn/graph.hpp"

namespace tsgn {

class FetchError : public Error {
  public:
    using Error::Error;
};

class AuthError : public FetchError {
  public:
    using FetchError::FetchError;
};

class SchemaError : public FetchError {
  public:
    using FetchError::FetchError;
};

/// Etherscan-style account API client settings.
struct FetchConfig {
    std::string base_url = "https://api.etherscan.io";
    std::string path = "/api";
    std::string api_key;  // falls back to $TSGN_API_KEY
    double requests_per_second = 5.0;
    std::size_t page_size = 1000;
    std::size_t max_pages = 10;
    std::size_t max_retries = 5;
    std::chrono::milliseconds backoff_base{500};
    std::chrono::seconds timeout{30};

    std::string resolved_api_key() const {
        if (!api_key.empty()) return api_key;
        const char* env = std::getenv("TSGN_API_KEY");
        return env ? env : "";
    }
};

/// Process-wide request spacing shared by every client.
class RateLimiter {
  public:
    static RateLimiter& global() {
        static RateLimiter limiter;
        return limiter;
    }

    void acquire(double per_second) {
        if (per_second <= 0.0) return;
        const auto spacing = std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(1.0 / per_second));
        Clock::time_point slot;
        {
            std::lock_guard lock(mu_);
            const auto now = Clock::now();
            slot = std::max(now, next_);
            next_ = slot + spacing;
        }
        std::this_thread::sleep_until(slot);
    }

  private:
    using Clock = std::chrono::steady_clock;
    std::mutex mu_;
    Clock::time_point next_{};
};

namespace detail {

inline double wei_to_eth(const std::string& wei) {
    if (wei.empty() || wei.find_first_not_of("0123456789") != std::string::npos) {
        throw SchemaError("value is not a decimal wei amount: '" + wei + "'");
    }
    return static_cast<double>(std::stold(wei) / 1e18L);
}

inline std::string field(const nlohmann::json& tx, const char* key) {
    auto it = tx.find(key);
    if (it == tx.end() || !it->is_string()) {
        throw SchemaError(std::string("transaction is missing string field '") + key + "'");
    }
    return it->get<std::string>();
}

inline bool is_rate_limit_message(const std::string& s) {
    return s.find("rate limit") != std::string::npos || s.find("Max rate") != std::string::npos;
}

}  // namespace detail

struct TxPage {
    std::vector<TransactionRecord> records;
    std::size_t raw_count = 0;  // entries in the response, skipped ones included
};

/// Decodes one txlist response body. A page with raw_count 0 marks the end
/// of the history.
inline TxPage decode_txlist_page(const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("response is not json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("result")) throw SchemaError("response has no result field");
    const auto& result = j["result"];
    if (result.is_string()) {
        auto msg = result.get<std::string>();
        if (msg.find("API Key") != std::string::npos) throw AuthError(msg);
        throw FetchError(msg);
    }
    if (!result.is_array()) throw SchemaError("result is not an array");

    TxPage page{{}, result.size()};
    page.records.reserve(result.size());
    for (const auto& tx : result) {
        if (!tx.is_object()) throw SchemaError("transaction entry is not an object");
        TransactionRecord r;
        r.tx_hash = detail::field(tx, "hash");
        r.src = detail::field(tx, "from");
        r.dst = detail::field(tx, "to");
        r.amount = detail::wei_to_eth(detail::field(tx, "value"));
        auto ts = detail::field(tx, "timeStamp");
        try {
            r.timestamp = std::stoll(ts);
        } catch (const std::exception&) {
            throw SchemaError("bad timeStamp '" + ts + "'");
        }
        // Contract creations have no recipient; failed calls move no value.
        if (r.dst.empty() || tx.value("isError", std::string("0")) == "1") continue;
        page.records.push_back(std::move(r));
    }
    return page;
}

/// Paginated history of normal transactions touching `address`.
///
/// Pages are requested until an empty page or `max_pages`. Connection
/// failures, HTTP 429/5xx and rate-limit replies are retried with exponential
/// backoff, at most `max_retries` times per page.
inline std::vector<TransactionRecord> fetch_address_history(const std::string& address,
                                                            const FetchConfig& cfg) {
    httplib::Client client(cfg.base_url);
    if (!client.is_valid()) throw FetchError("cannot create http client for '" + cfg.base_url + "'");
    client.set_connection_timeout(cfg.timeout);
    client.set_read_timeout(cfg.timeout);
    const auto key = cfg.resolved_api_key();

    std::vector<TransactionRecord> records;
    for (std::size_t page = 1; page <= cfg.max_pages; ++page) {
        httplib::Params params{{"module", "account"},
                               {"action", "txlist"},
                               {"address", address},
                               {"page", std::to_string(page)},
                               {"offset", std::to_string(cfg.page_size)},
                               {"sort", "asc"},
                               {"apikey", key}};
        TxPage batch;
        for (std::size_t attempt = 0;; ++attempt) {
            std::string transient;
            RateLimiter::global().acquire(cfg.requests_per_second);
            auto res = client.Get(cfg.path, params, httplib::Headers{});
            if (!res) {
                transient = "network error: " + httplib::to_string(res.error());
            } else if (res->status == 401 || res->status == 403) {
                throw AuthError("authentication failed (HTTP " + std::to_string(res->status) + ")");
            } else if (res->status == 429 || res->status >= 500) {
                transient = "HTTP " + std::to_string(res->status);
            } else if (res->status != 200) {
                throw FetchError("unexpected HTTP " + std::to_string(res->status));
            } else {
                try {
                    batch = decode_txlist_page(res->body);
                    break;
                } catch (const AuthError&) {
                    throw;
                } catch (const SchemaError&) {
                    throw;
                } catch (const FetchError& e) {
                    if (!detail::is_rate_limit_message(e.what())) throw;
                    transient = e.what();
                }
            }
            if (attempt >= cfg.max_retries) {
                throw FetchError("giving up after " + std::to_string(attempt + 1) +
                                 " attempts: " + transient);
            }
            std::this_thread::sleep_for(cfg.backoff_base * (1LL << attempt));
        }
        if (batch.raw_count == 0) break;
        for (auto& r : batch.records) records.push_back(std::move(r));
    }
    return records;
}

}  // namespace tsgn
