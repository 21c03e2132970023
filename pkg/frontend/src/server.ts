/**
 * HTTP surface of the sidecar: POST /v1/embed, /v1/infer, /v1/entail and
 * GET /v1/health.  Malformed requests answer 400 with {"error": <message>};
 * unexpected failures answer 500 with the same shape.
 */

import express, { type Express, type Request, type Response } from "express";

import {
  EmbedModel,
  EntailModel,
  InferModel,
  ModelError,
  type RelationTable,
} from "./models.js";

export interface ServerConfig {
  relations: RelationTable;
  dim?: number;
  seed?: number;
}

function badRequest(res: Response, message: string): void {
  res.status(400).json({ error: message });
}

function isStringArray(v: unknown): v is string[] {
  return Array.isArray(v) && v.every((x) => typeof x === "string");
}

export function createApp(config: ServerConfig): Express {
  const embedModel = new EmbedModel(config.dim ?? 256);
  const inferModel = new InferModel(config.relations, config.seed ?? 0);
  const entailModel = new EntailModel();

  const app = express();
  app.use(express.json({ limit: "5mb" }));
  // body-parser JSON syntax errors -> protocol-shaped 400
  app.use(
    (err: Error, _req: Request, res: Response, next: express.NextFunction) => {
      if (err instanceof SyntaxError) {
        badRequest(res, `malformed JSON body: ${err.message}`);
        return;
      }
      next(err);
    },
  );

  app.get("/v1/health", (_req, res) => {
    res.json({ status: "ok", dim: embedModel.dim });
  });

  app.post("/v1/embed", (req, res) => {
    const { texts } = req.body ?? {};
    if (!isStringArray(texts) || texts.length === 0) {
      badRequest(res, "embed: body must be {texts: [non-empty string list]}");
      return;
    }
    try {
      res.json({ dim: embedModel.dim, vectors: embedModel.embed(texts) });
    } catch (err) {
      if (err instanceof ModelError) badRequest(res, err.message);
      else throw err;
    }
  });

  app.post("/v1/infer", (req, res) => {
    const { context, relation, n } = req.body ?? {};
    if (typeof context !== "string" || context.length === 0) {
      badRequest(res, "infer: 'context' must be a non-empty string");
      return;
    }
    if (typeof relation !== "string") {
      badRequest(res, "infer: 'relation' must be a string");
      return;
    }
    if (typeof n !== "number") {
      badRequest(res, "infer: 'n' must be a number");
      return;
    }
    try {
      res.json({ candidates: inferModel.infer(context, relation, n) });
    } catch (err) {
      if (err instanceof ModelError) badRequest(res, err.message);
      else throw err;
    }
  });

  app.post("/v1/entail", (req, res) => {
    const { premise, hypothesis } = req.body ?? {};
    if (typeof premise !== "string" || typeof hypothesis !== "string") {
      badRequest(res, "entail: 'premise' and 'hypothesis' must be strings");
      return;
    }
    try {
      res.json({ score: entailModel.entail(premise, hypothesis) });
    } catch (err) {
      if (err instanceof ModelError) badRequest(res, err.message);
      else throw err;
    }
  });

  // catch-all error handler keeps the {"error": s} shape on 500s
  app.use(
    (err: Error, _req: Request, res: Response, _next: express.NextFunction) => {
      res.status(500).json({ error: err.message });
    },
  );
  return app;
}
