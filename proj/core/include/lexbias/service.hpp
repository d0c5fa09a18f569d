#pragma once

#include <memory>
#include <string>

#include "lexbias/humankit.hpp"

namespace lexbias::humankit {

// HTTP+JSON front end of an AnnotationStore.
//
//   POST /batches                      sample two sibling batches
//   GET  /batches/{id}/next?annotator= next task payload, {"done":true} at the end
//   POST /batches/{id}/judgments       record one judgment (idempotent)
//   GET  /batches/{id}/progress        {"done","total"}
//   GET  /export?batch=ID[,ID...]      prediction JSONL
//
// Annotator endpoints require the batch token, sent as the X-Batch-Token
// header or a `token` query parameter.
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationStore& store);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds to host:port (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lexbias::humankit
