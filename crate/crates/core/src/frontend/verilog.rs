use std::collections::HashMap;

use super::FrontendError;
use crate::netlist::{Circuit, GateKind, NetId, Netlist};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    /// `1'b0` / `1'b1`
    Const(bool),
    Punct(char),
    /// Outside the subset; reported when the parser reaches it.
    Unsupported(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, FrontendError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize| {
        if chars[*i] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut line, &mut col);
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (l0, c0) = (line, col);
            bump(&mut i, &mut line, &mut col);
            bump(&mut i, &mut line, &mut col);
            loop {
                if i + 1 >= chars.len() {
                    return Err(FrontendError::Syntax {
                        line: l0,
                        col: c0,
                        message: "unterminated block comment".into(),
                    });
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    bump(&mut i, &mut line, &mut col);
                    bump(&mut i, &mut line, &mut col);
                    break;
                }
                bump(&mut i, &mut line, &mut col);
            }
        } else if c.is_ascii_alphabetic() || c == '_' || c == '\\' {
            let (l0, c0) = (line, col);
            let mut s = String::new();
            if c == '\\' {
                // escaped identifier, terminated by whitespace
                bump(&mut i, &mut line, &mut col);
                while i < chars.len() && !chars[i].is_whitespace() {
                    s.push(chars[i]);
                    bump(&mut i, &mut line, &mut col);
                }
            } else {
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '$')
                {
                    s.push(chars[i]);
                    bump(&mut i, &mut line, &mut col);
                }
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l0,
                col: c0,
            });
        } else if c.is_ascii_digit() {
            let (l0, c0) = (line, col);
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '\'') {
                s.push(chars[i]);
                bump(&mut i, &mut line, &mut col);
            }
            let tok = match s.as_str() {
                "1'b0" => Tok::Const(false),
                "1'b1" => Tok::Const(true),
                _ => {
                    return Err(FrontendError::Unsupported {
                        line: l0,
                        col: c0,
                        construct: format!("numeric literal `{s}`"),
                    })
                }
            };
            out.push(Token {
                tok,
                line: l0,
                col: c0,
            });
        } else if "(),;".contains(c) {
            out.push(Token {
                tok: Tok::Punct(c),
                line,
                col,
            });
            bump(&mut i, &mut line, &mut col);
        } else {
            out.push(Token {
                tok: Tok::Unsupported(c),
                line,
                col,
            });
            bump(&mut i, &mut line, &mut col);
        }
    }
    Ok(out)
}

fn gate_kind(word: &str) -> Option<GateKind> {
    Some(match word {
        "not" => GateKind::Not,
        "buf" => GateKind::Buf,
        "and" => GateKind::And,
        "or" => GateKind::Or,
        "nand" => GateKind::Nand,
        "nor" => GateKind::Nor,
        "xor" => GateKind::Xor,
        "xnor" => GateKind::Xnor,
        _ => return None,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Decl {
    Input,
    Output,
    Wire,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

/// A gate argument as written in the source.
enum Arg {
    Net(String, usize, usize),
    Const(bool),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Token, FrontendError> {
        let t = self.toks.get(self.pos).cloned().ok_or(FrontendError::Syntax {
            line: self.end.0,
            col: self.end.1,
            message: "unexpected end of input".into(),
        })?;
        self.pos += 1;
        if let Tok::Unsupported(c) = t.tok {
            let construct = match c {
                '[' | ']' => "bus range".to_owned(),
                '=' => "continuous assignment or expression".to_owned(),
                '.' => "named port connection".to_owned(),
                '#' => "delay or parameter".to_owned(),
                '`' => "compiler directive".to_owned(),
                other => format!("character `{other}`"),
            };
            return Err(FrontendError::Unsupported {
                line: t.line,
                col: t.col,
                construct,
            });
        }
        Ok(t)
    }

    fn err<T>(t: &Token, message: impl Into<String>) -> Result<T, FrontendError> {
        Err(FrontendError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn expect(&mut self, p: char) -> Result<Token, FrontendError> {
        let t = self.next()?;
        if t.tok != Tok::Punct(p) {
            return Self::err(&t, format!("expected `{p}`"));
        }
        Ok(t)
    }

    fn ident(&mut self) -> Result<(String, Token), FrontendError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            _ => Self::err(&t, "expected identifier"),
        }
    }

    /// `name ("," name)* ";"`
    fn name_list(&mut self) -> Result<Vec<(String, Token)>, FrontendError> {
        let mut names = vec![self.ident()?];
        loop {
            let t = self.next()?;
            match t.tok {
                Tok::Punct(',') => names.push(self.ident()?),
                Tok::Punct(';') => return Ok(names),
                _ => return Self::err(&t, "expected `,` or `;`"),
            }
        }
    }

    fn arg(&mut self) -> Result<Arg, FrontendError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok(Arg::Net(s, t.line, t.col)),
            Tok::Const(b) => Ok(Arg::Const(b)),
            _ => Self::err(&t, "expected net name"),
        }
    }
}

/// Parses a single structural module. Ports are positional with the output
/// first, e.g. `nand NAND2_0(G10, G1, G3);`.
pub fn parse_verilog(text: &str) -> Result<Circuit, FrontendError> {
    let toks = lex(text)?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.col));
    let mut p = Parser { toks, pos: 0, end };

    let (kw, t) = p.ident()?;
    if kw != "module" {
        return Parser::err(&t, "expected `module`");
    }
    let (name, _) = p.ident()?;
    let mut ports = Vec::new();
    if p.peek().map(|t| &t.tok) == Some(&Tok::Punct('(')) {
        p.expect('(')?;
        if p.peek().map(|t| &t.tok) == Some(&Tok::Punct(')')) {
            p.next()?;
        } else {
            loop {
                ports.push(p.ident()?);
                let t = p.next()?;
                match t.tok {
                    Tok::Punct(',') => {}
                    Tok::Punct(')') => break,
                    _ => return Parser::err(&t, "expected `,` or `)` in port list"),
                }
            }
        }
    }
    p.expect(';')?;

    let mut netlist = Netlist::new(name);
    let mut declared: HashMap<String, Decl> = HashMap::new();
    let mut consts: [Option<NetId>; 2] = [None, None];
    let mut anon = 0usize;

    loop {
        let t = p.next()?;
        let word = match &t.tok {
            Tok::Ident(w) => w.clone(),
            _ => return Parser::err(&t, "expected declaration, gate instance or `endmodule`"),
        };
        match word.as_str() {
            "endmodule" => break,
            "input" | "output" | "wire" => {
                let decl = match word.as_str() {
                    "input" => Decl::Input,
                    "output" => Decl::Output,
                    _ => Decl::Wire,
                };
                for (net, nt) in p.name_list()? {
                    match (declared.get(&net).copied(), decl) {
                        (None, _) => {
                            declared.insert(net.clone(), decl);
                            match decl {
                                Decl::Input => {
                                    netlist.add_input(&net);
                                }
                                Decl::Output => {
                                    netlist.add_output(&net);
                                }
                                Decl::Wire => {
                                    netlist.net(&net);
                                }
                            }
                        }
                        // `wire` restating a port is common in generated netlists
                        (Some(_), Decl::Wire) => {}
                        (Some(Decl::Wire), Decl::Input) => {
                            return Parser::err(&nt, format!("`{net}` declared as wire before input"));
                        }
                        (Some(Decl::Wire), Decl::Output) => {
                            declared.insert(net.clone(), Decl::Output);
                            netlist.add_output(&net);
                        }
                        (Some(_), _) => {
                            return Parser::err(&nt, format!("`{net}` declared twice"));
                        }
                    }
                }
            }
            _ => {
                let Some(kind) = gate_kind(&word) else {
                    return Err(FrontendError::Unsupported {
                        line: t.line,
                        col: t.col,
                        construct: format!("`{word}`"),
                    });
                };
                let inst = match p.peek().map(|t| &t.tok) {
                    Some(Tok::Ident(_)) => p.ident()?.0,
                    _ => {
                        anon += 1;
                        format!("{word}_{anon}")
                    }
                };
                p.expect('(')?;
                let mut args = vec![p.arg()?];
                loop {
                    let t = p.next()?;
                    match t.tok {
                        Tok::Punct(',') => args.push(p.arg()?),
                        Tok::Punct(')') => break,
                        _ => return Parser::err(&t, "expected `,` or `)`"),
                    }
                }
                p.expect(';')?;

                let mut resolve = |arg: &Arg, netlist: &mut Netlist| -> Result<NetId, FrontendError> {
                    match arg {
                        Arg::Net(n, line, col) => {
                            if !declared.contains_key(n) {
                                return Err(FrontendError::UndeclaredNet {
                                    line: *line,
                                    col: *col,
                                    net: n.clone(),
                                });
                            }
                            Ok(netlist.net(n))
                        }
                        Arg::Const(b) => Ok(*consts[usize::from(*b)].get_or_insert_with(|| {
                            let net = netlist.net(if *b { "1'b1" } else { "1'b0" });
                            let k = if *b { GateKind::Const1 } else { GateKind::Const0 };
                            netlist.add_gate(k, k.keyword().to_ascii_uppercase(), net, vec![]);
                            net
                        })),
                    }
                };

                let Arg::Net(..) = &args[0] else {
                    return Parser::err(&t, format!("gate `{inst}` drives a constant"));
                };
                let output = resolve(&args[0], &mut netlist)?;
                if let (GateKind::Buf, [_, Arg::Const(b)]) = (kind, args.as_slice()) {
                    let k = if *b { GateKind::Const1 } else { GateKind::Const0 };
                    netlist.add_gate(k, inst, output, vec![]);
                    continue;
                }
                let fan_in = args.len() - 1;
                if !kind.accepts_fan_in(fan_in) {
                    return Err(FrontendError::Arity {
                        line: t.line,
                        gate: inst,
                        kind: kind.to_string(),
                        fan_in,
                    });
                }
                let inputs = args[1..]
                    .iter()
                    .map(|a| resolve(a, &mut netlist))
                    .collect::<Result<Vec<_>, _>>()?;
                netlist.add_gate(kind, inst, output, inputs);
            }
        }
    }
    if let Some(t) = p.peek() {
        return Parser::err(t, "trailing input after `endmodule`");
    }
    for (port, t) in &ports {
        match declared.get(port) {
            Some(Decl::Input) | Some(Decl::Output) => {}
            _ => {
                return Parser::err(t, format!("port `{port}` is not declared input or output"));
            }
        }
    }
    Ok(netlist.into_circuit()?)
}
