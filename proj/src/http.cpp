#include <httplib.h>

#include <atomic>

#include "ethoscan/errors.hpp"
#include "ethoscan/ingest.hpp"
#include "ethoscan/links.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan::ingest {
namespace {

std::atomic<std::int64_t> g_constructed{0};

class HttplibTransport : public HttpTransport {
 public:
  HttpResponse get(const std::string& url,
                   const std::map<std::string, std::string>& headers) override {
    auto parts = links::split_url(url);
    if (!parts) throw Error(ErrorCode::kNetwork, "malformed URL: " + url);
    httplib::Headers h(headers.begin(), headers.end());
    h.emplace("User-Agent", std::string("ethoscan/") + ETHOSCAN_VERSION);

    httplib::Client& cli = client(*parts);
    std::lock_guard<std::mutex> lock(mu_);
    auto res = cli.Get(parts->target, h);
    if (!res) {
      throw Error(ErrorCode::kNetwork,
                  "request to " + url + " failed: " + httplib::to_string(res.error()));
    }
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) out.headers[text::to_lower_ascii(k)] = v;
    return out;
  }

 private:
  httplib::Client& client(const links::UrlParts& p) {
    std::lock_guard<std::mutex> lock(mu_);
    std::string key = p.scheme + "://" + p.host + ":" + std::to_string(p.port);
    auto it = clients_.find(key);
    if (it == clients_.end()) {
      auto cli = std::make_unique<httplib::Client>(key);
      cli->set_follow_location(true);
      cli->set_connection_timeout(15);
      cli->set_read_timeout(60);
      it = clients_.emplace(key, std::move(cli)).first;
    }
    return *it->second;
  }

  std::mutex mu_;
  std::map<std::string, std::unique_ptr<httplib::Client>> clients_;
};

}  // namespace

HttpTransport::HttpTransport() { ++g_constructed; }

std::int64_t HttpTransport::constructed() { return g_constructed.load(); }

std::unique_ptr<HttpTransport> make_http_transport() {
  return std::make_unique<HttplibTransport>();
}

}  // namespace ethoscan::ingest
