#include "rku/cli.hpp"

#include <fcntl.h>
#include <pthread.h>
#include <signal.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <iostream>
#include <memory>
#include <sstream>

#include "rku/api.hpp"
#include "rku/error.hpp"
#include "rku/json_codec.hpp"
#include "rku/notify.hpp"
#include "rku/service_desk.hpp"
#include "rku/store.hpp"

namespace rku::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kLockFile = ".lock";

/// Advisory flock on <store>/.lock. `serve` holds it for its lifetime;
/// mutating commands hold it for one run and refuse to start while taken.
class StoreLock {
 public:
  explicit StoreLock(const fs::path& store) {
    std::error_code ec;
    fs::create_directories(store, ec);
    const auto path = store / kLockFile;
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::StorageFailure, "cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::StoreLocked,
                  "store " + store.string() + " is locked by a running serve instance");
    }
  }
  ~StoreLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

struct Options {
  std::string store;
  std::optional<std::string> config;
  bool json_output = false;
  std::string actor = "cli";
};

ServerConfig resolve_config(const Options& opts, const CliContext& ctx) {
  ServerConfig cfg =
      load_config(opts.config ? std::optional<fs::path>(*opts.config) : std::nullopt, ctx.env);
  if (!opts.store.empty()) cfg.store_path = opts.store;
  return cfg;
}

/// Store, auth, desk and notification sinks wired the way `serve` wires them.
struct Runtime {
  ServerConfig config;
  std::unique_ptr<StoreLock> lock;
  std::unique_ptr<Store> store;
  std::unique_ptr<auth::AuthService> auth;
  notify::Dispatcher dispatcher;
  std::unique_ptr<ServiceDesk> desk;

  Runtime(const Options& opts, CliContext& ctx, bool mutating) {
    config = resolve_config(opts, ctx);
    if (mutating) lock = std::make_unique<StoreLock>(config.store_path);
    store = std::make_unique<Store>(config.store_path);
    auth::AuthOptions auth_opts;
    auth_opts.token_ttl = config.token_ttl;
    auth_opts.cost = ctx.hash_cost;
    auth = std::make_unique<auth::AuthService>(*store, ctx.clock, auth_opts);
    dispatcher.add_sink(std::make_shared<notify::LogSink>(ctx.out));
    if (config.webhook_url) {
      dispatcher.add_sink(std::make_shared<notify::WebhookSink>(*config.webhook_url,
                                                                notify::http_transport(), ctx.err));
    }
    desk = std::make_unique<ServiceDesk>(*store, dispatcher, ctx.clock);
  }
};

void print_order(std::ostream& out, const ServiceOrder& o) {
  out << o.nota.str() << "  " << to_string(o.status()) << "  " << to_string(o.division) << "  "
      << o.customer_id << "\n";
  for (const auto& e : o.history) {
    out << "  " << format_iso8601(e.at) << "  " << to_string(e.status) << "  by " << e.actor;
    if (e.note) out << "  (" << *e.note << ")";
    out << "\n";
  }
}

struct DemoCustomer {
  const char* name;
  const char* email;
  const char* phone;
  const char* password;
};

constexpr DemoCustomer kDemoCustomers[] = {
    {"Budi Santoso", "budi@example.com", "0711-350001", "budi-demo-2016"},
    {"Siti Rahma", "siti@example.com", "0711-350002", "siti-demo-2016"},
    {"Andi Wijaya", "andi@example.com", nullptr, "andi-demo-2016"},
};

struct DemoFaq {
  const char* question;
  const char* answer;
  std::vector<std::string> tags;
};

const std::vector<DemoFaq>& demo_faq() {
  static const std::vector<DemoFaq> faq = {
      {"Berapa lama proses perbaikan printer di RKU?",
       "Perbaikan printer umumnya selesai dalam 2 sampai 3 hari kerja, tergantung ketersediaan "
       "suku cadang.",
       {"printer", "durasi"}},
      {"Bagaimana cara melihat status service perangkat saya?",
       "Masukkan no nota pada halaman Service lalu tekan Cari untuk melihat riwayat status.",
       {"service", "nota"}},
      {"Apakah data di laptop saya aman selama perbaikan software?",
       "Teknisi divisi software tidak membuka data pribadi; cadangkan data penting sebelum "
       "menyerahkan perangkat.",
       {"software", "data"}},
      {"Apa yang harus dibawa saat mengambil perangkat?",
       "Bawa bukti perbaikan (nota) yang diberikan saat perangkat diterima.",
       {"pengambilan", "nota"}},
      {"Apakah ada garansi setelah perbaikan hardware?",
       "Perbaikan hardware bergaransi 30 hari untuk kerusakan yang sama.",
       {"hardware", "garansi"}},
      {"Bagaimana cara menyampaikan keluhan?",
       "Gunakan halaman Keluhan Pelanggan; staf RKU akan menindaklanjuti keluhan Anda.",
       {"keluhan"}},
  };
  return faq;
}

struct DemoOrder {
  int customer;
  Division division;
  DeviceInfo device;
  const char* problem;
  std::vector<OrderStatus> path;
};

int seed_demo(Runtime& rt, CliContext& ctx, const Options& opts) {
  const auto snap = rt.store->snapshot();
  if (!snap.customers.empty() || !snap.orders.empty() || !snap.faq.empty()) {
    throw Error(ErrorCode::Validation, "seed-demo needs an empty store");
  }
  const Timestamp intake = make_timestamp(2016, 5, 20, 8, 0, 0);
  auth::AuthService seeder(*rt.store, fixed_clock(intake),
                           auth::AuthOptions{rt.config.token_ttl, ctx.hash_cost});

  std::vector<Customer> customers;
  for (const auto& c : kDemoCustomers) {
    customers.push_back(seeder.provision_customer(
        c.name, c.email, c.phone ? std::optional<std::string>(c.phone) : std::nullopt, c.password));
  }
  seeder.provision_account(Role::Admin, "Admin RKU", "admin@example.com", "admin-demo-2016");
  seeder.provision_account(Role::Staff, "Teknisi RKU", "staff@example.com", "staff-demo-2016");

  const std::vector<DemoOrder> orders = {
      {0,
       Division::Printer,
       {DeviceCategory::Printer, "Epson", "Epson L360"},
       "kertas macet",
       {OrderStatus::Diagnosing, OrderStatus::InRepair}},
      {1,
       Division::Software,
       {DeviceCategory::Computer, "Acer", "Acer Aspire laptop"},
       "Windows tidak bisa booting",
       {OrderStatus::Diagnosing, OrderStatus::InRepair, OrderStatus::Completed}},
      {2,
       Division::Hardware,
       {DeviceCategory::Computer, "Lenovo", "Lenovo desktop"},
       "tidak menyala",
       {OrderStatus::Diagnosing, OrderStatus::AwaitingParts}},
      {0,
       Division::Hardware,
       {DeviceCategory::Accessory, "Logitech", "keyboard USB"},
       "beberapa tombol tidak berfungsi",
       {}},
      {1,
       Division::Printer,
       {DeviceCategory::Printer, "Canon", "Canon iP2770"},
       "hasil cetak bergaris",
       {OrderStatus::Diagnosing, OrderStatus::InRepair, OrderStatus::Completed,
        OrderStatus::PickedUp}},
  };
  std::vector<std::string> notas;
  for (const auto& demo : orders) {
    auto order = new_order(customers[demo.customer].id, demo.division, demo.device, demo.problem,
                           "seed-demo", intake);
    order.nota = rt.store->issue_nota(date_of(intake));
    auto at = intake;
    for (auto step : demo.path) {
      at += std::chrono::hours(4);
      order = transition(order, step, "seed-demo", std::nullopt, at);
    }
    rt.store->save_order(order);
    notas.push_back(order.nota.str());
  }
  for (const auto& f : demo_faq()) {
    rt.store->upsert_faq(FaqEntry{"", f.question, f.answer, f.tags});
  }

  if (opts.json_output) {
    json out{{"customers", customers.size()}, {"orders", notas}, {"faq", demo_faq().size()}};
    ctx.out << out.dump() << "\n";
  } else {
    ctx.out << "seeded 3 customers, 5 orders, 6 FAQ entries\n";
    for (const auto& c : kDemoCustomers)
      ctx.out << "  customer " << c.email << " / " << c.password << "\n";
    ctx.out << "  admin admin@example.com / admin-demo-2016\n";
    ctx.out << "  staff staff@example.com / staff-demo-2016\n";
    for (const auto& n : notas) ctx.out << "  order " << n << "\n";
  }
  return kExitOk;
}

int serve(const Options& opts, std::optional<int> port, CliContext& ctx) {
  auto cfg = resolve_config(opts, ctx);
  if (port) cfg.port = *port;

  // Signals are consumed by sigwait below; block them before any thread starts.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  StoreLock lock(cfg.store_path);
  Store store(cfg.store_path);
  auth::AuthService auth(store, ctx.clock, auth::AuthOptions{cfg.token_ttl, ctx.hash_cost});
  notify::Dispatcher dispatcher;
  dispatcher.add_sink(std::make_shared<notify::LogSink>(ctx.out));
  if (cfg.webhook_url) {
    dispatcher.add_sink(
        std::make_shared<notify::WebhookSink>(*cfg.webhook_url, notify::http_transport(), ctx.err));
  }
  api::ApiServer server(store, auth, dispatcher, ctx.clock, cfg.static_dir);
  const int bound = server.start(cfg.bind_address, cfg.port);
  ctx.out << "rku serving on " << cfg.bind_address << ":" << bound << " (store "
          << cfg.store_path.string() << ")\n"
          << std::flush;

  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  ctx.out << "rku stopped\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, CliContext& ctx) {
  CLI::App app{"RKU repair desk operator tool", "rku"};
  app.require_subcommand(1);
  Options opts;
  app.add_option("--store", opts.store, "Store directory (default RKU_STORE_PATH or ./data)");
  app.add_option("--config", opts.config, "JSON config file");
  app.add_flag("--json", opts.json_output, "Machine-readable output");
  app.add_option("--actor", opts.actor, "Actor recorded in order history");

  std::optional<int> serve_port;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--port", serve_port, "Listen port (default RKU_PORT or 8080)");
  serve_cmd->add_option("--store", opts.store, "Store directory");

  auto* customer_cmd = app.add_subcommand("customer", "Customer records")->require_subcommand(1);
  auto* customer_add = customer_cmd->add_subcommand("add", "Register a customer");
  std::string name, email, password;
  std::optional<std::string> phone;
  customer_add->add_option("--name", name)->required();
  customer_add->add_option("--email", email)->required();
  customer_add->add_option("--phone", phone);
  customer_add->add_option("--password", password)->required();

  auto* account_cmd =
      app.add_subcommand("account", "Staff and admin accounts")->require_subcommand(1);
  auto* account_add = account_cmd->add_subcommand("add", "Provision a staff or admin account");
  std::string role_name;
  account_add->add_option("--role", role_name)
      ->required()
      ->check(CLI::IsMember({"staff", "admin"}));
  account_add->add_option("--name", name)->required();
  account_add->add_option("--email", email)->required();
  account_add->add_option("--password", password)->required();

  auto* order_cmd = app.add_subcommand("order", "Service orders")->require_subcommand(1);
  auto* order_create = order_cmd->add_subcommand("create", "Take in a device");
  std::string customer_id, division, category, brand, desc, problem;
  order_create->add_option("--customer-id", customer_id)->required();
  order_create->add_option("--division", division)->required();
  order_create->add_option("--category", category)->required();
  order_create->add_option("--brand", brand)->required();
  order_create->add_option("--desc", desc)->required();
  order_create->add_option("--problem", problem)->required();

  auto* order_status = order_cmd->add_subcommand("status", "Move an order to another status");
  std::string nota_text, to_name;
  std::optional<std::string> note, from_name;
  order_status->add_option("--nota", nota_text)->required();
  order_status->add_option("--to", to_name)->required();
  order_status->add_option("--note", note);
  order_status->add_option("--from", from_name, "Expected current status (idempotent replay)");

  auto* order_show = order_cmd->add_subcommand("show", "Print one order");
  order_show->add_option("--nota", nota_text)->required();

  auto* faq_cmd = app.add_subcommand("faq", "FAQ entries")->require_subcommand(1);
  auto* faq_add = faq_cmd->add_subcommand("add", "Add an FAQ entry");
  std::string question, answer;
  std::vector<std::string> tags;
  faq_add->add_option("--question", question)->required();
  faq_add->add_option("--answer", answer)->required();
  faq_add->add_option("--tags", tags)->delimiter(',');

  auto* complaints_cmd =
      app.add_subcommand("complaints", "Customer complaints")->require_subcommand(1);
  auto* complaints_list = complaints_cmd->add_subcommand("list", "List complaints, newest first");
  std::optional<std::string> state_name;
  complaints_list->add_option("--state", state_name);

  auto* seed_cmd = app.add_subcommand("seed-demo", "Load the demo dataset into an empty store");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    ctx.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    ctx.out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    ctx.err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*serve_cmd) return serve(opts, serve_port, ctx);

    if (*seed_cmd) {
      Runtime rt(opts, ctx, true);
      return seed_demo(rt, ctx, opts);
    }

    if (*customer_add) {
      Runtime rt(opts, ctx, true);
      auto c = rt.auth->provision_customer(name, email, phone, password);
      if (opts.json_output) {
        ctx.out << json(c).dump() << "\n";
      } else {
        ctx.out << c.id << "\n";
      }
      return kExitOk;
    }

    if (*account_add) {
      Runtime rt(opts, ctx, true);
      const Role role = role_name == "admin" ? Role::Admin : Role::Staff;
      auto a = rt.auth->provision_account(role, name, email, password);
      if (opts.json_output) {
        ctx.out << json{{"account_id", a.account_id},
                        {"email", a.email},
                        {"role", to_string(a.role)}}
                       .dump()
                << "\n";
      } else {
        ctx.out << a.account_id << "\n";
      }
      return kExitOk;
    }

    if (*order_create) {
      Runtime rt(opts, ctx, true);
      OrderIntake intake;
      intake.customer_id = customer_id;
      intake.division = parse_division(division);
      intake.device = DeviceInfo{parse_device_category(category), brand, desc};
      intake.problem = problem;
      auto order = rt.desk->create_order(intake, opts.actor);
      if (opts.json_output) {
        ctx.out << json(order).dump() << "\n";
      } else {
        ctx.out << order.nota.str() << "\n";
      }
      return kExitOk;
    }

    if (*order_status) {
      Runtime rt(opts, ctx, true);
      const auto nota = NotaNumber::parse(nota_text);
      const auto to = parse_order_status(to_name);
      std::optional<OrderStatus> from;
      if (from_name) from = parse_order_status(*from_name);
      auto result = rt.desk->change_status(nota, to, opts.actor, note, from);
      if (opts.json_output) {
        ctx.out << json(result.order).dump() << "\n";
      } else {
        ctx.out << result.order.nota.str() << " " << to_string(result.order.status()) << "\n";
      }
      return kExitOk;
    }

    if (*order_show) {
      Runtime rt(opts, ctx, false);
      const auto nota = NotaNumber::parse(nota_text);
      auto order = rt.store->find_order_by_nota(nota);
      if (!order) throw Error(ErrorCode::NotFound, "no order with nota " + nota.str());
      if (opts.json_output) {
        ctx.out << json(*order).dump() << "\n";
      } else {
        print_order(ctx.out, *order);
      }
      return kExitOk;
    }

    if (*faq_add) {
      Runtime rt(opts, ctx, true);
      auto entry = rt.store->upsert_faq(FaqEntry{"", question, answer, tags});
      if (opts.json_output) {
        ctx.out << json(entry).dump() << "\n";
      } else {
        ctx.out << entry.id << "\n";
      }
      return kExitOk;
    }

    if (*complaints_list) {
      Runtime rt(opts, ctx, false);
      std::optional<ComplaintState> state;
      if (state_name) state = parse_complaint_state(*state_name);
      auto list = rt.store->list_complaints(state);
      std::reverse(list.begin(), list.end());
      if (opts.json_output) {
        ctx.out << json(list).dump() << "\n";
      } else {
        for (const auto& c : list) {
          ctx.out << c.id << "  " << to_string(c.state) << "  " << format_iso8601(c.created_at)
                  << "  " << c.customer_id << "  " << (c.nota ? c.nota->str() : "-") << "  "
                  << c.text << "\n";
        }
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    ctx.err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitDomainError;
  }
  ctx.err << app.help();
  return kExitUsage;
}

}  // namespace rku::cli
