/* Copyright 2026 The CultureMod Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#include "culturemod/service/http_server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "culturemod/core/culture.hpp"
#include "culturemod/eval/study.hpp"

namespace culturemod::service {

using nlohmann::json;

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::empty_input:
      return 400;
    case ErrorKind::not_found:
      return 404;
    case ErrorKind::conflict:
      return 409;
    case ErrorKind::unavailable:
    case ErrorKind::retriable:
      return 503;
    case ErrorKind::configuration:
    case ErrorKind::io:
    case ErrorKind::diverged:
      return 500;
  }
  return 500;
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorKind kind, const std::string& message) {
  send_json(res, {{"error", to_string(kind)}, {"message", message}}, http_status(kind));
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::invalid_argument, std::string("body is not valid JSON: ") + e.what());
  }
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

}  // namespace

HttpServer::HttpServer(std::shared_ptr<ModerationService> service, std::shared_ptr<AnnotationStore> store,
                       std::shared_ptr<const StudyCoordinator> study, ServiceConfig config)
    : service_(std::move(service)),
      store_(std::move(store)),
      study_(study ? std::move(study) : std::make_shared<const StudyCoordinator>()),
      config_(std::move(config)),
      server_(std::make_unique<httplib::Server>()) {
  if (!service_ || !store_) throw Error(ErrorKind::configuration, "server needs a service and a store");
  install_routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::install_routes() {
  auto& s = *server_;
  const std::string token = config_.api_token;

  // Wraps a handler with auth and error mapping.
  auto wrap = [token](Handler h) -> Handler {
    return [token, h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      if (!token.empty() && req.get_header_value("Authorization") != "Bearer " + token) {
        send_json(res, {{"error", "unauthorized"}, {"message", "missing or wrong bearer token"}}, 401);
        return;
      }
      try {
        h(req, res);
      } catch (const Error& e) {
        send_error(res, e.kind(), e.what());
      } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", req.method, req.path, e.what());
        send_json(res, {{"error", "internal"}, {"message", e.what()}}, 500);
      }
    };
  };

  s.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"status", "ok"}});
  });

  s.Post("/v1/assess", wrap([this](const httplib::Request& req, httplib::Response& res) {
    const auto query = ModerationQuery::from_json(parse_body(req));
    json out = json::array();
    for (const auto& a : service_->assess(query)) out.push_back(a.to_json());
    send_json(res, out);
  }));

  s.Post("/v1/reason", wrap([this](const httplib::Request& req, httplib::Response& res) {
    const auto query = ModerationQuery::from_json(parse_body(req));
    send_json(res, service_->reason(query).to_json());
  }));

  s.Get("/v1/cultures", wrap([this](const httplib::Request&, httplib::Response& res) {
    static const CultureRegistry names = CultureRegistry::defaults();
    json out = json::array();
    for (const auto& l : service_->registry().list()) {
      json row = {{"culture", l.culture.code()},
                  {"display_name", names.contains(l.culture) ? names.display_name(l.culture) : l.culture.code()},
                  {"stage", l.stage ? json(model::to_string(*l.stage)) : json(nullptr)},
                  {"version", l.version},
                  {"ready", l.stage == model::Stage::classifier_ready},
                  {"loaded", l.loaded}};
      out.push_back(row);
    }
    send_json(res, out);
  }));

  s.Get("/v1/study/next", wrap([this](const httplib::Request& req, httplib::Response& res) {
    std::optional<CultureId> culture;
    if (req.has_param("culture")) culture = CultureId(req.get_param_value("culture"));
    auto q = study_->next(req.get_param_value("annotator"), culture, *store_);
    if (!q) {
      send_json(res, {{"done", true}});
      return;
    }
    (*q)["done"] = false;
    send_json(res, *q);
  }));

  s.Post("/v1/study/rank", wrap([this](const httplib::Request& req, httplib::Response& res) {
    const auto session = study_->make_session(parse_body(req));
    const auto id = store_->append(session);
    send_json(res, {{"id", id}}, 201);
  }));

  s.Get("/v1/study/report", wrap([this](const httplib::Request&, httplib::Response& res) {
    const auto sessions = store_->all();
    const auto report = eval::study_report(sessions, config_.kendall_bootstrap_iters,
                                           config_.kendall_permutation_iters, config_.seed);
    send_json(res, report.to_json());
  }));

  s.Post("/v1/admin/reload", wrap([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    if (!body.is_object() || !body.contains("culture") || !body["culture"].is_string()) {
      throw Error(ErrorKind::invalid_argument, "reload needs {\"culture\": code}");
    }
    const auto b = service_->registry().reload(CultureId(body["culture"].get<std::string>()));
    send_json(res, {{"culture", b->culture.code()},
                    {"stage", model::to_string(b->stage)},
                    {"version", b->version()},
                    {"reloaded", true}});
  }));

  if (!config_.static_dir.empty()) {
    if (!s.set_mount_point("/", config_.static_dir.string())) {
      throw Error(ErrorKind::configuration, "static dir " + config_.static_dir.string() + " not found");
    }
  }
}

int HttpServer::bind() {
  int port = config_.port == 0 ? server_->bind_to_any_port(config_.host)
                               : (server_->bind_to_port(config_.host, config_.port) ? config_.port : -1);
  if (port < 0) {
    throw Error(ErrorKind::unavailable, "cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  return port;
}

void HttpServer::serve() { server_->listen_after_bind(); }

void HttpServer::listen() {
  const int port = bind();
  spdlog::info("listening on {}:{}", config_.host, port);
  serve();
}

void HttpServer::stop() {
  if (server_) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

std::unique_ptr<HttpServer> make_http_server(const ServiceConfig& config) {
  auto registry = std::make_shared<BundleRegistry>(config.bundle_dir);
  std::shared_ptr<llm::TextGenerator> summarizer;
  if (!config.summarizer.empty()) summarizer = llm::make_text_generator(config.summarizer);
  auto service = std::make_shared<ModerationService>(
      registry, config.decoding, ReasonOptions{config.disagreement_threshold}, summarizer);
  auto store = std::make_shared<JsonlAnnotationStore>(config.annotation_store);
  auto study = config.study_dir.empty()
                   ? std::make_shared<const StudyCoordinator>()
                   : std::make_shared<const StudyCoordinator>(StudyCoordinator::load(config.study_dir));
  return std::make_unique<HttpServer>(service, store, study, config);
}

}  // namespace culturemod::service
