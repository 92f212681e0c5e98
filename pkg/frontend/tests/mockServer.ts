/** A FetchLike backed by captured real-server payloads. Routes mirror the
 * /api/v1 surface; propose picks the matching recorded reflection by
 * comparing the submitted assignment to the recorded ones. */

import type { FetchLike } from "../src/api.js";
import answer from "./fixtures/answer.json";
import assignmentConflict from "./fixtures/assignment_conflict.json";
import instanceView from "./fixtures/instance_view.json";
import reflectionConflict from "./fixtures/reflection_conflict.json";
import reflectionImperfect from "./fixtures/reflection_imperfect.json";
import reflectionPerfect from "./fixtures/reflection_perfect.json";
import scoreReport from "./fixtures/score_report.json";
import session from "./fixtures/session.json";

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
}

export interface MockServer {
  fetch: FetchLike;
  requests: RecordedRequest[];
  instanceId: string;
  perfectAssignment: Record<string, string>;
}

function respond(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function makeMockServer(): MockServer {
  const requests: RecordedRequest[] = [];
  const instanceId = instanceView.id;
  const perfect = answer.assignment as Record<string, string>;

  const fetchImpl: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    requests.push({ method, path, body });

    if (path === "/api/v1/instances") {
      return respond(200, {
        instances: [
          { id: instanceId, level: instanceView.level, template: "C", party_size: 6 },
        ],
      });
    }
    if (path === `/api/v1/instances/${instanceId}`) {
      return respond(200, instanceView);
    }
    if (path.startsWith("/api/v1/instances/")) {
      return respond(404, { detail: "unknown instance" });
    }
    if (path === "/api/v1/sessions" && method === "POST") {
      return respond(200, session);
    }
    const sid = (session as { session_id: string }).session_id;
    if (path === `/api/v1/sessions/${sid}/propose` && method === "POST") {
      const assignment = body.assignment as Record<string, string>;
      const matches = (target: Record<string, string>) =>
        Object.keys(target).every((k) => assignment[k] === target[k]);
      if (matches(perfect)) return respond(200, reflectionPerfect);
      if (matches(assignmentConflict as Record<string, string>)) {
        return respond(200, reflectionConflict);
      }
      return respond(200, reflectionImperfect);
    }
    if (path === `/api/v1/sessions/${sid}/finalize` && method === "POST") {
      return respond(200, scoreReport);
    }
    if (path === `/api/v1/sessions/${sid}/answer`) {
      return respond(200, answer);
    }
    return respond(404, { detail: `no route for ${method} ${path}` });
  };

  return { fetch: fetchImpl, requests, instanceId, perfectAssignment: perfect };
}
