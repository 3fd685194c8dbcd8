// Thin client for the four service endpoints. No quiz semantics live here;
// the server is the single source of truth for rendering and generation.

import type {
  ApiErrorBody,
  ExampleMeta,
  PreviewResponse,
  TemplateDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public errors: { path: string; message: string }[],
  ) {
    super(errors.map((e) => (e.path ? `${e.path}: ` : "") + e.message).join("; "));
  }
}

async function raiseFor(res: Response): Promise<never> {
  let body: ApiErrorBody;
  try {
    body = (await res.json()) as ApiErrorBody;
  } catch {
    body = { errors: [{ path: "", message: `HTTP ${res.status}` }] };
  }
  throw new ApiError(res.status, body.errors ?? []);
}

export class QuizforgeClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async post(path: string, body: unknown, signal?: AbortSignal) {
    return this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  async validate(template: TemplateDoc): Promise<void> {
    const res = await this.post("/api/validate", template);
    if (!res.ok) await raiseFor(res);
  }

  async preview(
    template: TemplateDoc,
    seed: number,
    index: number,
    story?: number,
    signal?: AbortSignal,
  ): Promise<PreviewResponse> {
    const body: Record<string, unknown> = { template, seed, index };
    if (story !== undefined) body.story = story;
    const res = await this.post("/api/preview", body, signal);
    if (!res.ok) await raiseFor(res);
    return (await res.json()) as PreviewResponse;
  }

  async generate(
    template: TemplateDoc,
    seed: number,
    n: number,
  ): Promise<{ xml: Uint8Array; filename: string; manifest: { seed: number; n: number; sha256: string } }> {
    const res = await this.post("/api/generate", { template, seed, n });
    if (!res.ok) await raiseFor(res);
    const manifest = JSON.parse(res.headers.get("x-quizforge-manifest") ?? "{}");
    const disposition = res.headers.get("content-disposition") ?? "";
    const m = /filename="([^"]+)"/.exec(disposition);
    return {
      xml: new Uint8Array(await res.arrayBuffer()),
      filename: m ? m[1] : "quiz.xml",
      manifest,
    };
  }

  async listExamples(): Promise<ExampleMeta[]> {
    const res = await this.fetchFn(this.baseUrl + "/api/examples");
    if (!res.ok) await raiseFor(res);
    return (await res.json()) as ExampleMeta[];
  }

  async getExample(id: number): Promise<TemplateDoc> {
    const res = await this.fetchFn(this.baseUrl + `/api/examples/${id}`);
    if (!res.ok) await raiseFor(res);
    return (await res.json()) as TemplateDoc;
  }
}
