import { Api, ApiError } from "./api.js";
import { renderGraph } from "./graph.js";
import { renderTree } from "./tree.js";
import type { CandidateJson, NodeJson, Subsets, TreeJson } from "./types.js";

const SHAPES = [
  { key: "p1", label: "GF liveness" },
  { key: "p2", label: "G invariant" },
  { key: "p3", label: "transition trigger" },
  { key: "p4", label: "transition target" },
] as const;

type ShapeKey = (typeof SHAPES)[number]["key"];

function shapeControls(): string {
  return SHAPES.map(
    ({ key, label }) => `
      <div class="shape-row">
        <label><input type="checkbox" class="${key}-on" checked> ${label}</label>
        <input type="text" class="${key}-vars" placeholder="all env vars">
      </div>`,
  ).join("");
}

const TEMPLATE = `
  <div class="pane spec-pane">
    <h2>Specification</h2>
    <textarea class="spec-input" rows="14" spellcheck="false"></textarea>
    <button class="load-btn">Load</button>
    <div class="status"></div>
  </div>
  <div class="pane node-pane">
    <h2>Current node</h2>
    <div class="node-info"></div>
    <div class="graph"></div>
  </div>
  <div class="pane control-pane">
    <h2>Candidate assumptions</h2>
    <div class="subsets">${shapeControls()}</div>
    <button class="cands-btn">List candidates</button>
    <ol class="candidates"></ol>
    <h2>Auto search</h2>
    <div class="auto-row">
      depth <input class="alpha" type="number" value="2" min="1">
      <label><input type="checkbox" class="all-mode"> every refinement</label>
      <button class="auto-btn">Search</button>
    </div>
    <ol class="refinements"></ol>
  </div>
  <div class="pane tree-pane">
    <h2>Session tree</h2>
    <div class="tree-holder"></div>
  </div>
`;

/** Wires the page together; every method round-trips through the API. */
export class App {
  private session: string | null = null;
  private candidates: CandidateJson[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly api: Api,
  ) {
    root.innerHTML = TEMPLATE;
    root.classList.add("explorer");
    this.q<HTMLButtonElement>(".load-btn").addEventListener("click", () => {
      void this.guard(() =>
        this.loadSpec(this.q<HTMLTextAreaElement>(".spec-input").value),
      );
    });
    this.q<HTMLButtonElement>(".cands-btn").addEventListener("click", () => {
      void this.guard(() => this.fetchCandidates());
    });
    this.q<HTMLButtonElement>(".auto-btn").addEventListener("click", () => {
      const alpha = Number(this.q<HTMLInputElement>(".alpha").value) || 1;
      const all = this.q<HTMLInputElement>(".all-mode").checked;
      void this.guard(() => this.runAuto(alpha, all));
    });
  }

  get sessionId(): string | null {
    return this.session;
  }

  private q<T extends Element>(selector: string): T {
    const el = this.root.querySelector(selector);
    if (!el) {
      throw new Error(`missing element ${selector}`);
    }
    return el as T;
  }

  private async guard(action: () => Promise<void>): Promise<void> {
    try {
      await action();
    } catch (err) {
      if (err instanceof ApiError) {
        this.setStatus(`error ${err.status}: ${err.message}`, true);
      } else {
        this.setStatus(String(err), true);
      }
    }
  }

  private setStatus(text: string, isError = false): void {
    const el = this.q<HTMLElement>(".status");
    el.textContent = text;
    el.className = isError ? "status error" : "status";
  }

  /** Current projection subsets as read from the shape controls. */
  subsets(): Subsets {
    const out: Subsets = {};
    for (const { key } of SHAPES) {
      out[key as ShapeKey] = this.readShape(key);
    }
    return out;
  }

  private readShape(key: ShapeKey): string[] | undefined {
    const enabled = this.q<HTMLInputElement>(`.${key}-on`).checked;
    if (!enabled) {
      return [];
    }
    const raw = this.q<HTMLInputElement>(`.${key}-vars`).value;
    const names = raw
      .split(",")
      .map((n) => n.trim())
      .filter((n) => n.length > 0);
    return names.length > 0 ? names : undefined;
  }

  async loadSpec(text: string): Promise<void> {
    const created = await this.api.createSession(text);
    this.session = created.id;
    this.candidates = [];
    this.q<HTMLElement>(".candidates").replaceChildren();
    this.q<HTMLElement>(".refinements").replaceChildren();
    this.setStatus(`session ${created.id} created`);
    await this.refresh();
  }

  private need(): string {
    if (this.session === null) {
      throw new ApiError(0, "load a specification first");
    }
    return this.session;
  }

  async fetchCandidates(): Promise<void> {
    const sid = this.need();
    this.candidates = await this.api.candidates(sid, this.subsets());
    const list = this.q<HTMLElement>(".candidates");
    list.replaceChildren();
    const doc = this.root.ownerDocument;
    for (const cand of this.candidates) {
      const li = doc.createElement("li");
      li.className = cand.consistent ? "candidate" : "candidate inconsistent";
      const formula = doc.createElement("span");
      formula.className = "formula";
      formula.textContent = cand.formula;
      const button = doc.createElement("button");
      button.textContent = "apply";
      button.disabled = !cand.consistent;
      button.addEventListener("click", () => {
        void this.guard(() => this.applyCandidate(cand.index));
      });
      li.append(formula, button);
      if (!cand.consistent) {
        const badge = doc.createElement("span");
        badge.className = "badge inconsistent";
        badge.textContent = "inconsistent";
        li.append(badge);
      }
      list.appendChild(li);
    }
    this.setStatus(`${this.candidates.length} candidates`);
  }

  async applyCandidate(index: number): Promise<void> {
    const sid = this.need();
    const result = await this.api.apply(sid, index);
    this.setStatus(`applied candidate ${index}, now at ${result.current}`);
    await this.refresh();
  }

  async goBack(nodeId: string): Promise<void> {
    const sid = this.need();
    await this.api.back(sid, nodeId);
    this.setStatus(`moved to ${nodeId}`);
    await this.refresh();
  }

  async runAuto(alpha: number, all: boolean): Promise<void> {
    const sid = this.need();
    const result = await this.api.auto(sid, alpha, all, this.subsets());
    const list = this.q<HTMLElement>(".refinements");
    list.replaceChildren();
    const doc = this.root.ownerDocument;
    for (const parts of result.report.refinements) {
      const li = doc.createElement("li");
      li.className = "refinement";
      for (const formula of parts) {
        const span = doc.createElement("span");
        span.className = "formula";
        span.textContent = formula;
        li.appendChild(span);
      }
      list.appendChild(li);
    }
    this.setStatus(
      `search done: ${result.report.refinements.length} refinements, ` +
        `${result.report.counterstrategies_processed} counter-strategies`,
    );
    await this.refresh();
  }

  /** Re-pull the tree and re-render the current node. */
  async refresh(): Promise<void> {
    const sid = this.need();
    const tree = await this.api.tree(sid);
    const holder = this.q<HTMLElement>(".tree-holder");
    holder.replaceChildren(
      renderTree(tree, (id) => void this.guard(() => this.goBack(id)),
        this.root.ownerDocument),
    );
    const current = tree.nodes.find((n) => n.id === tree.current);
    if (current) {
      this.renderNode(current);
    }
  }

  private renderNode(node: NodeJson): void {
    const info = this.q<HTMLElement>(".node-info");
    const verdict = !node.consistent
      ? "INCONSISTENT"
      : node.realizable
        ? "REALIZABLE"
        : "UNREALIZABLE";
    const added =
      node.formulas.length > 0 ? ` · ${node.formulas.join(" ; ")}` : "";
    info.textContent = `${node.id} · ${verdict}${added}`;
    info.className = `node-info ${verdict.toLowerCase()}`;
    const graph = this.q<HTMLElement>(".graph");
    graph.replaceChildren();
    if (node.counterstrategy) {
      graph.appendChild(
        renderGraph(node.counterstrategy, this.root.ownerDocument),
      );
    } else {
      const note = this.root.ownerDocument.createElement("p");
      note.className = "no-graph";
      note.textContent = node.realizable
        ? "realizable: no counter-strategy to draw"
        : "no counter-strategy available";
      graph.appendChild(note);
    }
  }
}

export function mount(root: HTMLElement, base = ""): App {
  return new App(root, new Api(base));
}
