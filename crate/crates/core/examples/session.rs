//! Drives an editor session the way a front end does: framed request
//! messages in, framed responses out.

use std::io::Cursor;

use minuml::commands::Command;
use minuml::model::Point;
use minuml::session::{decode_response, encode_frame, encode_request, read_frame, Request, SelectMode, Session};

fn main() -> minuml::Result<()> {
    let requests = [
        Request::Execute(Command::CreateClass {
            origin: Point::new(0.0, 0.0),
            name: Some("Cart".into()),
        }),
        Request::Execute(Command::CreateClass {
            origin: Point::new(240.0, 0.0),
            name: Some("Product".into()),
        }),
        Request::HitTest {
            point: Point::new(10.0, 10.0),
            tolerance: 2.0,
        },
        Request::SelectRect {
            rect: minuml::model::Rect::new(-5.0, -5.0, 400.0, 100.0),
            mode: SelectMode::Replace,
        },
        Request::Copy,
        Request::Undo,
        Request::SetZoom(9.0),
    ];
    let mut input = Vec::new();
    for (n, req) in requests.iter().enumerate() {
        let text = encode_request(Some(n as u64), req);
        if n == 0 {
            println!(
                "first request on the wire:\n{}",
                String::from_utf8_lossy(&encode_frame(text.as_bytes()))
            );
        }
        input.extend(encode_frame(text.as_bytes()));
    }

    let mut session = Session::default();
    let mut output = Vec::new();
    session.serve(&mut Cursor::new(input), &mut output)?;

    let mut replies = Cursor::new(output);
    while let Some(frame) = read_frame(&mut replies)? {
        let (id, resp) = decode_response(&frame)?;
        println!(
            "#{} {:?} created={:?} selection={:?} hit={:?} undo={} zoom={} snapshot={} clipboard={}",
            id.unwrap_or(0),
            resp.status,
            resp.created,
            resp.selection,
            resp.hit,
            resp.undo_depth,
            resp.zoom,
            resp.document.is_some(),
            resp.clipboard.is_some(),
        );
    }
    Ok(())
}
