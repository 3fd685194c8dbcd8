// Template document shapes accepted by the HTTP API.

export interface AnswerDoc {
  type: "numeric" | "choice" | "shortanswer" | "display";
  points?: number;
  targets?: string[];
  weights?: number[];
  tolerances?: string[];
  target?: string;
  ndigits?: string;
  partial_weight?: number;
  options?: string[];
  builtin?: number;
  correct?: string;
  texts?: string[];
  caps_insensitive?: boolean;
}

export interface PartDoc {
  text: string;
  answer?: AnswerDoc;
  newline?: boolean;
}

export interface StoryDoc {
  weight?: number;
  variables?: { name: string; expr: string }[];
  parts: PartDoc[];
  hint?: string;
  answer_text?: string;
}

export interface TemplateDoc {
  schema: string;
  name: string;
  category: string;
  quizname_prefix?: string;
  count?: number;
  h5_wrap?: boolean;
  stories: StoryDoc[];
}

export interface PreviewResponse {
  qtxt: string;
  htxt: string;
  atxt: string;
  category: string;
  quizname: string;
}

export interface ApiErrorBody {
  errors: { path: string; message: string }[];
}

export interface ExampleMeta {
  id: number;
  title: string;
  description: string;
}
