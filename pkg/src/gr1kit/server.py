"""HTTP JSON API for interactive spec repair.

One session holds one spec and a tree of refinement nodes; each node is
the spec plus the assumption conjuncts on its path.  The client walks
the tree by fetching candidates at the current node, applying one, or
stepping back; an automatic search can grow the tree by itself.

Routes (all JSON):

  GET  /api/health
  POST /api/session                     {spec_text}
  GET  /api/session/{sid}/tree
  GET  /api/session/{sid}/candidates?p1=a,b&p2=&p3=&p4=
  POST /api/session/{sid}/apply         {candidate_index}
  POST /api/session/{sid}/back          {node_id}
  POST /api/session/{sid}/auto          {alpha, all?, p1..p4?}

A missing projection parameter means every environment variable; an
empty one means the empty set, which switches that assumption shape
off.  Errors come back as {"error": ...} with 400, 404 or 409.

With a persistence directory, sessions survive restarts: the spec text
and the applied formulas are stored, and machines are rebuilt on load,
which is deterministic.  With a ui directory, non-API paths serve its
files, so the bundled explorer can run from the same port.
"""

from __future__ import annotations

import json
import os
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .abstraction import StatePredicate
from .candidates import Candidate, candidates_for
from .errors import SpecError
from .refine import check_consistency, refine_search
from .solver import solve_spec
from .specml import Gr1Spec, format_part, parse_assumption, parse_spec


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(message)


def counterstrategy_json(cs) -> dict:
    states = []
    for q in range(cs.n_states):
        pred = StatePredicate(cs.env_vars, cs.gamma[q])
        states.append({"id": q, "predicate": pred.text()})
    return {
        "states": states,
        "edges": [[src, dst] for src, dst in cs.graph_edges()],
        "initial": cs.initial,
    }


class Node:
    def __init__(self, node_id, parent, conjuncts, via, spec, state_limit=None):
        self.id = node_id
        self.parent = parent
        self.conjuncts = tuple(conjuncts)
        self.via = via
        self.children: list[str] = []
        parts = tuple(c for c in self.conjuncts)
        self.consistent = check_consistency(spec, parts)
        result = solve_spec(spec.with_extra_parts(parts), state_limit)
        self.realizable = result.realizable
        self.vacuous = result.vacuous
        self.counter_strategy = result.counter_strategy
        self.candidate_lists: dict[tuple, list[Candidate]] = {}
        self.last_candidates: list[Candidate] | None = None

    @property
    def formulas(self) -> list[str]:
        return [format_part(p) for p in self.conjuncts]

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "parent": self.parent,
            "formulas": self.formulas,
            "realizable": self.realizable,
            "consistent": self.consistent,
            "via": self.via,
            "children": list(self.children),
        }
        if self.counter_strategy is not None:
            out["counterstrategy"] = counterstrategy_json(self.counter_strategy)
        else:
            out["counterstrategy"] = None
        return out


class Session:
    def __init__(self, sid: str, spec_text: str, state_limit=None):
        self.id = sid
        self.spec_text = spec_text
        self.spec: Gr1Spec = parse_spec(spec_text)
        self.state_limit = state_limit
        self.lock = threading.Lock()
        self.nodes: dict[str, Node] = {}
        self.order: list[str] = []
        self.current = "n0"
        self._counter = 0
        self._add_node(None, (), "root")

    def _add_node(self, parent, conjuncts, via) -> Node:
        node_id = f"n{self._counter}"
        self._counter += 1
        node = Node(node_id, parent, conjuncts, via, self.spec, self.state_limit)
        self.nodes[node_id] = node
        self.order.append(node_id)
        if parent is not None:
            self.nodes[parent].children.append(node_id)
        return node

    def node(self, node_id: str) -> Node:
        if node_id not in self.nodes:
            raise ApiError(404, f"no node {node_id!r}")
        return self.nodes[node_id]

    def subsets_from_query(self, query: dict) -> tuple:
        def one(name):
            if name not in query:
                return None
            raw = query[name][0]
            return tuple(n.strip() for n in raw.split(",") if n.strip())

        return one("p1"), one("p2"), one("p3"), one("p4")

    def candidates_at(self, node: Node, subsets: tuple) -> list[Candidate]:
        if node.realizable:
            raise ApiError(409, "node is realizable; nothing to repair")
        if node.counter_strategy is None:
            raise ApiError(409, "node has no counter-strategy")
        key = subsets
        if key not in node.candidate_lists:
            p1, p2, p3, p4 = subsets
            node.candidate_lists[key] = candidates_for(
                node.counter_strategy, p1, p2, p3, p4
            )
        node.last_candidates = node.candidate_lists[key]
        return node.last_candidates

    def apply(self, index: int) -> Node:
        node = self.nodes[self.current]
        if node.realizable:
            raise ApiError(409, "node is realizable; nothing to apply")
        if node.last_candidates is None:
            raise ApiError(400, "fetch candidates before applying one")
        if not 0 <= index < len(node.last_candidates):
            raise ApiError(400, f"candidate index {index} out of range")
        cand = node.last_candidates[index]
        formula = format_part(cand.part)
        for child_id in node.children:
            child = self.nodes[child_id]
            if child.formulas and child.formulas[-1] == formula:
                self.current = child_id
                return child
        child = self._add_node(
            node.id, node.conjuncts + (cand.part,), "manual"
        )
        self.current = child.id
        return child

    def back(self, node_id: str) -> Node:
        node = self.node(node_id)
        self.current = node.id
        return node

    def auto(self, alpha: int, subsets: tuple, mode: str) -> dict:
        base = self.nodes[self.current]
        if base.realizable:
            raise ApiError(409, "node is realizable; nothing to search")
        p1, p2, p3, p4 = subsets
        spec_here = self.spec.with_extra_parts(base.conjuncts)
        result = refine_search(
            spec_here,
            alpha=alpha,
            p_liveness=p1,
            p_safety=p2,
            p_trigger=p3,
            p_target=p4,
            mode=mode,
            state_limit=self.state_limit,
        )
        leaves = []
        for parts in result.refinements:
            at = base
            for part in parts:
                formula = format_part(part)
                found = None
                for child_id in at.children:
                    child = self.nodes[child_id]
                    if child.formulas and child.formulas[-1] == formula:
                        found = child
                        break
                if found is None:
                    found = self._add_node(
                        at.id, at.conjuncts + (part,), "auto"
                    )
                at = found
            leaves.append(at.id)
        return {
            "report": result.report.to_dict(),
            "leaves": leaves,
        }

    def tree_json(self) -> dict:
        return {
            "id": self.id,
            "current": self.current,
            "nodes": [self.nodes[nid].to_json() for nid in self.order],
        }

    def persist_json(self) -> dict:
        return {
            "id": self.id,
            "spec_text": self.spec_text,
            "current": self.current,
            "nodes": [
                {
                    "id": nid,
                    "parent": self.nodes[nid].parent,
                    "formulas": self.nodes[nid].formulas,
                    "via": self.nodes[nid].via,
                }
                for nid in self.order
            ],
        }

    @classmethod
    def from_persist(cls, data: dict, state_limit=None) -> "Session":
        session = cls(data["id"], data["spec_text"], state_limit)
        for entry in data["nodes"]:
            if entry["parent"] is None:
                continue
            parts = tuple(
                parse_assumption(session.spec, f) for f in entry["formulas"]
            )
            node = session._add_node(entry["parent"], parts, entry["via"])
            if node.id != entry["id"]:
                msg = "stored session has inconsistent node ids"
                raise ValueError(msg)
        if data["current"] in session.nodes:
            session.current = data["current"]
        return session


class Store:
    def __init__(self, persist_dir=None, state_limit=None):
        self.persist_dir = persist_dir
        self.state_limit = state_limit
        self.lock = threading.Lock()
        self.sessions: dict[str, Session] = {}
        self._counter = 0
        if persist_dir:
            os.makedirs(persist_dir, exist_ok=True)
            self._load_all()

    def _load_all(self):
        for name in sorted(os.listdir(self.persist_dir)):
            if not name.endswith(".json"):
                continue
            path = os.path.join(self.persist_dir, name)
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
            session = Session.from_persist(data, self.state_limit)
            self.sessions[session.id] = session
            number = int(session.id.lstrip("s") or 0)
            self._counter = max(self._counter, number)

    def save(self, session: Session):
        if not self.persist_dir:
            return
        path = os.path.join(self.persist_dir, f"{session.id}.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(session.persist_json(), fh, indent=2, sort_keys=True)
        os.replace(tmp, path)

    def create(self, spec_text: str) -> Session:
        with self.lock:
            self._counter += 1
            sid = f"s{self._counter}"
            session = Session(sid, spec_text, self.state_limit)
            self.sessions[sid] = session
        self.save(session)
        return session

    def get(self, sid: str) -> Session:
        with self.lock:
            if sid not in self.sessions:
                raise ApiError(404, f"no session {sid!r}")
            return self.sessions[sid]


_ROUTE = re.compile(r"^/api/session/(?P<sid>[^/]+)(?:/(?P<verb>[a-z]+))?$")

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".map": "application/json",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


class Handler(BaseHTTPRequestHandler):
    store: Store = None
    ui_dir: str | None = None

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send_json(self, status: int, payload):
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            data = json.loads(raw)
        except json.JSONDecodeError:
            raise ApiError(400, "request body is not valid JSON") from None
        if not isinstance(data, dict):
            raise ApiError(400, "request body must be a JSON object")
        return data

    # -- static files ------------------------------------------------

    def _serve_static(self, path: str):
        assert self.ui_dir is not None
        rel = path.lstrip("/") or "index.html"
        full = os.path.realpath(os.path.join(self.ui_dir, rel))
        root = os.path.realpath(self.ui_dir)
        if not full.startswith(root + os.sep) and full != root:
            self._send_json(404, {"error": "not found"})
            return
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.isfile(full):
            self._send_json(404, {"error": "not found"})
            return
        ext = os.path.splitext(full)[1].lower()
        ctype = _CONTENT_TYPES.get(ext, "application/octet-stream")
        with open(full, "rb") as fh:
            body = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    # -- routing -----------------------------------------------------

    def do_GET(self):
        try:
            parsed = urlparse(self.path)
            if parsed.path == "/api/health":
                self._send_json(200, {"ok": True})
                return
            match = _ROUTE.match(parsed.path)
            if match:
                query = parse_qs(parsed.query, keep_blank_values=True)
                self._get_session_route(match, query)
                return
            if self.ui_dir and not parsed.path.startswith("/api/"):
                self._serve_static(parsed.path)
                return
            raise ApiError(404, "not found")
        except ApiError as exc:
            self._send_json(exc.status, {"error": exc.message})
        except SpecError as exc:
            self._send_json(400, {"error": str(exc)})

    def _get_session_route(self, match, query):
        session = self.store.get(match.group("sid"))
        verb = match.group("verb")
        with session.lock:
            if verb is None or verb == "tree":
                self._send_json(200, session.tree_json())
                return
            if verb == "candidates":
                subsets = session.subsets_from_query(query)
                node = session.nodes[session.current]
                cands = session.candidates_at(node, subsets)
                payload = [
                    {
                        "index": idx,
                        "formula": c.formula,
                        "consistent": check_consistency(
                            session.spec,
                            node.conjuncts + (c.part,),
                        ),
                    }
                    for idx, c in enumerate(cands)
                ]
                self._send_json(200, payload)
                return
        raise ApiError(404, "not found")

    def do_POST(self):
        try:
            parsed = urlparse(self.path)
            if parsed.path == "/api/session":
                body = self._read_json()
                spec_text = body.get("spec_text")
                if not isinstance(spec_text, str) or not spec_text.strip():
                    raise ApiError(400, "spec_text is required")
                session = self.store.create(spec_text)
                with session.lock:
                    root = session.nodes["n0"]
                    payload = {
                        "id": session.id,
                        "realizable": root.realizable,
                        "vacuous": root.vacuous,
                        "consistent": root.consistent,
                        "node": root.to_json(),
                    }
                self._send_json(200, payload)
                return
            match = _ROUTE.match(parsed.path)
            if not match:
                raise ApiError(404, "not found")
            session = self.store.get(match.group("sid"))
            verb = match.group("verb")
            body = self._read_json()
            with session.lock:
                if verb == "apply":
                    index = body.get("candidate_index")
                    if not isinstance(index, int):
                        raise ApiError(400, "candidate_index must be an integer")
                    node = session.apply(index)
                    payload = {"current": session.current, "node": node.to_json()}
                elif verb == "back":
                    node_id = body.get("node_id")
                    if not isinstance(node_id, str):
                        raise ApiError(400, "node_id must be a string")
                    node = session.back(node_id)
                    payload = {"current": session.current, "node": node.to_json()}
                elif verb == "auto":
                    alpha = body.get("alpha", 2)
                    if not isinstance(alpha, int) or alpha < 1:
                        raise ApiError(400, "alpha must be a positive integer")
                    subsets = tuple(
                        tuple(body[k]) if isinstance(body.get(k), list) else None
                        for k in ("p1", "p2", "p3", "p4")
                    )
                    mode = "all" if body.get("all") else "first"
                    payload = session.auto(alpha, subsets, mode)
                    payload["current"] = session.current
                else:
                    raise ApiError(404, "not found")
            self.store.save(session)
            self._send_json(200, payload)
        except ApiError as exc:
            self._send_json(exc.status, {"error": exc.message})
        except SpecError as exc:
            self._send_json(400, {"error": str(exc)})


def make_server(
    host: str = "127.0.0.1",
    port: int = 8719,
    persist_dir: str | None = None,
    ui_dir: str | None = None,
    state_limit: int | None = None,
) -> ThreadingHTTPServer:
    handler = type(
        "BoundHandler",
        (Handler,),
        {"store": Store(persist_dir, state_limit), "ui_dir": ui_dir},
    )
    return ThreadingHTTPServer((host, port), handler)


def serve(host="127.0.0.1", port=8719, persist_dir=None, ui_dir=None):
    server = make_server(host, port, persist_dir, ui_dir)
    where = f"http://{host}:{server.server_address[1]}/"
    print(f"serving on {where}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
