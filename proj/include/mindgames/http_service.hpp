#pragma once

// HTTP front end for SessionManager:
//   POST /sessions                  create a session from a JSON config
//   GET  /sessions/{id}             persuader-safe state
//   POST /sessions/{id}/messages    {"text": ...} from a person
//   POST /sessions/{id}/advance     next move of a server-side agent
//   GET  /sessions/{id}/stream      server-sent events, one per turn
//   GET  /instances                 instance ids available to sessions
//   GET  /export                    finished games as NDJSON
// Errors come back as {"error": <code>, "detail": ...}.

#include <chrono>
#include <string>

#include "httplib.h"
#include "mindgames/service.hpp"

namespace mindgames {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadConfig:
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kUnknownSession: return 404;
    case ErrorCode::kSessionFinished: return 409;
    case ErrorCode::kValidationRejected: return 422;
    case ErrorCode::kSessionBusy: return 429;
    case ErrorCode::kModelUnavailable:
    case ErrorCode::kClassifierUnavailable:
    case ErrorCode::kSessionAborted: return 503;
    default: return 500;
  }
}

namespace detail {

inline void send_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const ValidationRejectedError& e) {
    send_json(res,
              {{"error", "ValidationRejected"},
               {"reason", to_string(e.rejection().reason)},
               {"detail", e.rejection().detail}},
              422);
  } catch (const Error& e) {
    send_json(res, {{"error", to_string(e.code())}, {"detail", e.what()}}, http_status(e.code()));
  } catch (const Json::exception& e) {
    send_json(res, {{"error", "InvalidArgument"}, {"detail", e.what()}}, 400);
  }
}

}  // namespace detail

/// Registers the routes on `server`; `manager` must outlive it.
inline void install_routes(httplib::Server& server, SessionManager& manager) {
  using detail::guarded;
  using detail::send_json;

  server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = req.body.empty() ? Json::object() : Json::parse(req.body);
      const std::string id = manager.create(session_config_from_json(body));
      send_json(res, {{"session_id", id}, {"state", manager.get_state(id)}}, 201);
    });
  });

  server.Get(R"(/sessions/([\w-]+))", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, manager.get_state(req.matches[1])); });
  });

  server.Post(R"(/sessions/([\w-]+)/messages)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = Json::parse(req.body);
      auto r = manager.post_message(req.matches[1], body.at("text").get<std::string>());
      send_json(res, {{"reply", r.reply}, {"state", r.state}});
    });
  });

  server.Post(R"(/sessions/([\w-]+)/advance)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto r = manager.advance(req.matches[1]);
      send_json(res, {{"reply", r.reply}, {"state", r.state}});
    });
  });

  server.Get(R"(/sessions/([\w-]+)/stream)", [&](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    guarded(res, [&] {
      manager.get_state(id);  // 404 before the stream opens
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream", [&manager, id, next = std::size_t{0}](std::size_t, httplib::DataSink& sink) mutable {
            const auto events = manager.events_since(id, next, std::chrono::milliseconds(500));
            for (const auto& e : events) {
              const std::string frame = "event: turn\ndata: " + e + "\n\n";
              if (!sink.write(frame.data(), frame.size())) return false;
            }
            next += events.size();
            if (events.empty()) {
              if (manager.finished(id)) {
                sink.done();
                return true;
              }
              static constexpr std::string_view kPing = ": ping\n\n";
              if (!sink.write(kPing.data(), kPing.size())) return false;
            }
            return true;
          });
    });
  });

  server.Get("/instances", [&](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, {{"instances", manager.instance_ids()}}); });
  });

  server.Get("/export", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      TranscriptFilter filter;
      if (req.has_param("condition")) filter.condition = condition_from_string(req.get_param_value("condition"));
      if (req.has_param("variant")) filter.variant = variant_from_string(req.get_param_value("variant"));
      if (req.has_param("persuader")) filter.persuader = req.get_param_value("persuader");
      res.set_content(manager.export_transcripts(filter), "application/x-ndjson");
    });
  });
}

}  // namespace mindgames
