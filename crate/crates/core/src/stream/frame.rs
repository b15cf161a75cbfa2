//! Wire frames for the replay protocol.
//!
//! UTF-8, newline-terminated lines. Client speaks `HELLO\t<name>` once,
//! then `S\t<revision_id>\t<score>` per revision; the server answers
//! `WELCOME\t<k>` once, `R\t<revision_id>\t<row>` per revision (the row
//! is a corpus TSV line, so its fields already escape tabs/newlines),
//! and a bare `E` terminator.

use crate::corpus::RevisionId;

#[derive(Debug, Clone, PartialEq)]
pub enum ClientFrame {
    Hello { name: String },
    Score { revision_id: RevisionId, score: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ServerFrame {
    Welcome { k: usize },
    Revision { revision_id: RevisionId, row: String },
    End,
}

impl ClientFrame {
    pub fn serialize(&self) -> String {
        match self {
            ClientFrame::Hello { name } => format!("HELLO\t{name}\n"),
            ClientFrame::Score { revision_id, score } => {
                // default float formatting stays within 17 significant digits
                format!("S\t{revision_id}\t{score}\n")
            }
        }
    }

    /// Parse one client line (no trailing newline). `None` means the
    /// line is not a well-formed client frame.
    pub fn parse(line: &str) -> Option<ClientFrame> {
        let mut parts = line.splitn(3, '\t');
        match parts.next()? {
            "HELLO" => {
                let name = parts.next()?;
                if parts.next().is_some() || name.is_empty() {
                    return None;
                }
                Some(ClientFrame::Hello {
                    name: name.to_string(),
                })
            }
            "S" => {
                let id = parts.next()?.parse().ok()?;
                let score: f64 = parts.next()?.parse().ok()?;
                if !score.is_finite() {
                    return None;
                }
                Some(ClientFrame::Score {
                    revision_id: id,
                    score,
                })
            }
            _ => None,
        }
    }
}

impl ServerFrame {
    pub fn serialize(&self) -> String {
        match self {
            ServerFrame::Welcome { k } => format!("WELCOME\t{k}\n"),
            ServerFrame::Revision { revision_id, row } => format!("R\t{revision_id}\t{row}\n"),
            ServerFrame::End => "E\n".to_string(),
        }
    }

    pub fn parse(line: &str) -> Option<ServerFrame> {
        if line == "E" {
            return Some(ServerFrame::End);
        }
        let mut parts = line.splitn(3, '\t');
        match parts.next()? {
            "WELCOME" => {
                let k = parts.next()?.parse().ok()?;
                if parts.next().is_some() || k == 0 {
                    return None;
                }
                Some(ServerFrame::Welcome { k })
            }
            "R" => {
                let id = parts.next()?.parse().ok()?;
                let row = parts.next()?;
                Some(ServerFrame::Revision {
                    revision_id: id,
                    row: row.to_string(),
                })
            }
            _ => None,
        }
    }
}
