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


#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "culturemod/core/error.hpp"
#include "culturemod/service/annotation_store.hpp"
#include "culturemod/service/config.hpp"
#include "culturemod/service/moderation_service.hpp"

namespace httplib {
class Server;
}

namespace culturemod::service {

int http_status(ErrorKind kind);

// The /v1 wire API over a ModerationService, an annotation store and an
// optional study. Static files (the moderator UI bundle) are mounted at "/"
// when configured.
class HttpServer {
 public:
  HttpServer(std::shared_ptr<ModerationService> service, std::shared_ptr<AnnotationStore> store,
             std::shared_ptr<const StudyCoordinator> study, ServiceConfig config);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Blocks until stop(). Port 0 picks a free port.
  void listen();
  // Binds without serving; returns the bound port. Follow with serve().
  int bind();
  void serve();
  void stop();
  bool running() const;

 private:
  void install_routes();

  std::shared_ptr<ModerationService> service_;
  std::shared_ptr<AnnotationStore> store_;
  std::shared_ptr<const StudyCoordinator> study_;
  ServiceConfig config_;
  std::unique_ptr<httplib::Server> server_;
};

// Wires registry, store, study and summarizer from a config.
std::unique_ptr<HttpServer> make_http_server(const ServiceConfig& config);

}  // namespace culturemod::service
