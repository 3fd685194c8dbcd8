import { QuizforgeClient } from "./api.js";
import { BuilderApp } from "./app.js";

const base = new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8000";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");
const app = new BuilderApp(new QuizforgeClient(base), root);
void app.start();
