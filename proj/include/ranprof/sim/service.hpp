// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// HTTP facade over SimEngine. Telemetry endpoints mimic the real sources
// (rack PDU REST samples, estimator range queries); /sim/* is the admin
// plane the orchestrator and tests drive.
//
//   GET  /sim/health                          liveness + virtual now
//   GET  /sim/clock                           {now_ns, warp}
//   POST /sim/clock/advance                   {dur_ns} -> {now_ns}
//   POST /sim/deploy                          DeployRequest fields
//   POST /sim/teardown                        {name} (idempotent)
//   GET  /sim/inventory                       active components + UEs
//   POST /sim/ue/attach                       {ue_index, gnb}
//   POST /sim/ue/traffic                      TrafficRequest -> {session_id}
//   GET  /sim/ue/result?session_id=           result | 409 pending
//   POST /sim/ru/trace                        {ru, start_ns, end_ns, file}
//   POST /sim/fault                           fault injection toggles
//   POST /sim/reset                           {seed, epoch_ns}
//   GET  /pdu/outlets/:id/samples?start=&end=
//   GET  /metrics/query_range?pod=&start=&end=&step=

#pragma once

#include "ranprof/http_json.hpp"
#include "ranprof/sim/engine.hpp"

namespace ranprof::sim {

class SimService : public http::HttpService {
  public:
    explicit SimService(SimEngine& engine);

  private:
    void route();
    SimEngine& engine_;
};

}  // namespace ranprof::sim
