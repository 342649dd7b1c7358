/** Newick parser for the service's tree responses.
 *
 * Grammar handled: nested parentheses, comma-separated children, optional
 * labels (bare or single-quoted with '' escaping), optional ":length", and
 * the closing ";". Internal labels are kept when present.
 */

export interface NewickNode {
  label: string | null;
  length: number;
  children: NewickNode[];
}

class Scanner {
  pos = 0;

  constructor(private text: string) {}

  peek(): string {
    return this.text[this.pos] ?? "";
  }

  take(): string {
    return this.text[this.pos++] ?? "";
  }

  skipSpace(): void {
    while (/\s/.test(this.peek())) this.pos++;
  }

  fail(reason: string): never {
    throw new Error(`newick parse error at ${this.pos}: ${reason}`);
  }
}

function parseLabel(s: Scanner): string | null {
  s.skipSpace();
  if (s.peek() === "'") {
    s.take();
    let out = "";
    for (;;) {
      const c = s.take();
      if (c === "") s.fail("unterminated quoted label");
      if (c === "'") {
        if (s.peek() === "'") {
          out += "'";
          s.take();
        } else {
          return out;
        }
      } else {
        out += c;
      }
    }
  }
  let out = "";
  while (s.peek() !== "" && !"(),:;".includes(s.peek()) && !/\s/.test(s.peek())) {
    out += s.take();
  }
  return out === "" ? null : out;
}

function parseLength(s: Scanner): number {
  s.skipSpace();
  if (s.peek() !== ":") return 0;
  s.take();
  s.skipSpace();
  let raw = "";
  while (/[-+0-9.eE]/.test(s.peek())) raw += s.take();
  const value = Number(raw);
  if (raw === "" || Number.isNaN(value)) s.fail(`bad branch length '${raw}'`);
  return value;
}

function parseNode(s: Scanner): NewickNode {
  s.skipSpace();
  const children: NewickNode[] = [];
  if (s.peek() === "(") {
    s.take();
    for (;;) {
      children.push(parseNode(s));
      s.skipSpace();
      const c = s.take();
      if (c === ",") continue;
      if (c === ")") break;
      s.fail(`expected ',' or ')', got ${c || "end of input"}`);
    }
  }
  const label = parseLabel(s);
  const length = parseLength(s);
  return { label, length, children };
}

export function parseNewick(text: string): NewickNode {
  const s = new Scanner(text.trim());
  const root = parseNode(s);
  s.skipSpace();
  if (s.take() !== ";") s.fail("missing trailing ';'");
  s.skipSpace();
  if (s.peek() !== "") s.fail("trailing content after ';'");
  return root;
}

export function leafLabels(node: NewickNode): string[] {
  if (node.children.length === 0) return [node.label ?? ""];
  return node.children.flatMap(leafLabels);
}
