#include "lexbias/service.hpp"

#include <httplib.h>

#include <sstream>

#include "lexbias/error.hpp"
#include "lexbias/ingest.hpp"

namespace lexbias::humankit {
namespace {

using json::Json;
using json::OrderedJson;

void send_json(httplib::Response& res, int status, const OrderedJson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  OrderedJson body;
  body["error"] = message;
  send_json(res, status, body);
}

std::string token_of(const httplib::Request& req) {
  if (req.has_header("X-Batch-Token")) return req.get_header_value("X-Batch-Token");
  if (req.has_param("token")) return req.get_param_value("token");
  return {};
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

SampleRequest sample_request_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("sampling request must be a JSON object");
  SampleRequest r;
  r.dataset = json::string_field(j, "dataset");
  r.variant = parse_variant(json::string_field(j, "variant"));
  const Json& annotators = json::field(j, "annotators");
  if (!annotators.is_array() || annotators.size() != 2) {
    throw ValidationError("field \"annotators\" must list exactly two names");
  }
  r.annotators = {annotators[0].get<std::string>(), annotators[1].get<std::string>()};
  if (j.contains("n_per_annotator")) r.n_per_annotator = json::count_field(j, "n_per_annotator");
  if (j.contains("overlap")) r.overlap = json::count_field(j, "overlap");
  r.seed = json::field(j, "seed").get<std::uint64_t>();
  if (j.contains("created_at")) r.created_at = json::string_field(j, "created_at");
  return r;
}

// Maps lexbias errors to HTTP statuses.
template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const NotFound& e) {
      send_error(res, 404, e.what());
    } catch (const Conflict& e) {
      send_error(res, 409, e.what());
    } catch (const ValidationError& e) {
      send_error(res, 400, e.what());
    } catch (const Json::exception& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

}  // namespace

struct AnnotationServer::Impl {
  AnnotationStore& store;
  httplib::Server server;

  explicit Impl(AnnotationStore& s) : store(s) { routes(); }

  bool authorized(const httplib::Request& req, httplib::Response& res, const std::string& batch_id) {
    if (!store.find_batch(batch_id)) throw NotFound("unknown batch " + batch_id);
    if (store.check_token(batch_id, token_of(req))) return true;
    send_error(res, 403, "missing or invalid batch token");
    return false;
  }

  void routes() {
    server.Post("/batches", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto [a, b] = store.create_batches(sample_request_from_json(Json::parse(req.body)));
      OrderedJson body;
      body["batches"] = OrderedJson::array({to_json(a), to_json(b)});
      send_json(res, 201, body);
    }));

    server.Get(R"(/batches/([^/]+)/next)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string batch_id = req.matches[1];
      if (!authorized(req, res, batch_id)) return;
      const std::string annotator = req.get_param_value("annotator");
      const std::string search = req.has_param("search") ? req.get_param_value("search") : "";
      const auto task = store.serve_next(batch_id, annotator, search);
      const Progress prog = store.progress(batch_id);
      OrderedJson body;
      body["done"] = !task.has_value();
      body["progress"] = {{"done", prog.done}, {"total", prog.total}};
      if (task) body["task"] = to_json(*task);
      send_json(res, 200, body);
    }));

    server.Post(R"(/batches/([^/]+)/judgments)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string batch_id = req.matches[1];
      if (!authorized(req, res, batch_id)) return;
      Json j = Json::parse(req.body);
      if (!j.is_object()) throw ValidationError("judgment must be a JSON object");
      if (!j.contains("batch_id")) j["batch_id"] = batch_id;
      Judgment jd = judgment_from_json(j);
      if (jd.batch_id != batch_id) throw ValidationError("judgment batch_id does not match the URL");
      const RecordOutcome outcome = store.record_judgment(std::move(jd));
      const Progress prog = store.progress(batch_id);
      OrderedJson body;
      body["status"] = outcome == RecordOutcome::stored ? "stored" : "duplicate";
      body["progress"] = {{"done", prog.done}, {"total", prog.total}};
      send_json(res, outcome == RecordOutcome::stored ? 201 : 200, body);
    }));

    server.Get(R"(/batches/([^/]+)/progress)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string batch_id = req.matches[1];
      if (!authorized(req, res, batch_id)) return;
      const Progress prog = store.progress(batch_id);
      send_json(res, 200, OrderedJson{{"done", prog.done}, {"total", prog.total}});
    }));

    server.Get("/export", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::vector<std::string> ids;
      const std::size_t n = req.get_param_value_count("batch");
      for (std::size_t i = 0; i < n; ++i) {
        for (auto& id : split_commas(req.get_param_value("batch", i))) ids.push_back(std::move(id));
      }
      if (ids.empty()) throw ValidationError("export needs at least one batch parameter");
      res.status = 200;
      res.set_content(ingest::predictions_text(store.export_judgments(ids)), "application/x-ndjson");
    }));
  }
};

AnnotationServer::AnnotationServer(AnnotationStore& store) : impl_(std::make_unique<Impl>(store)) {}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void AnnotationServer::listen() { impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace lexbias::humankit
